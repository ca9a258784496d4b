#pragma once

// Reverse-mode automatic differentiation for scalar objectives of a single
// parameter vector.
//
// An objective is assembled once as an expression DAG (Expr), compiled into
// a topologically ordered program, and evaluated through a Tape that stores
// one value and one adjoint per node. Nodes are vector valued (scalars are
// length-1 vectors) so that a product with a data matrix is one node rather
// than n*p scalar nodes.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sco/errors.hpp"

namespace sco {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Op : std::uint8_t {
  Parameter,
  Constant,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Exp,
  Log,
  Sqrt,
  Pow,
  Abs,
  Sigmoid,
  Log1pExp,
  Dot,
  SquaredNorm,
  Norm,
  CumSum,
  Sum,
  MatVec,
  Element,
};

std::string_view op_name(Op op);

namespace detail {
struct ExprNode;
}

/// Symbolic expression over one parameter vector and constants.
///
/// Binary elementwise operators accept equal sizes or a length-1 operand,
/// which is broadcast. Shape errors surface as ConstructionError at the
/// point where the expression is built.
class Expr {
 public:
  Expr(double constant);  // NOLINT(google-explicit-constructor)

  static Expr parameter(Index dimension);
  static Expr constant(Vector values);

  Index size() const;
  Op op() const;

  /// Element i of a vector expression, as a scalar expression.
  Expr operator[](Index i) const;

  const std::shared_ptr<const detail::ExprNode>& node() const { return node_; }

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
  friend Expr make_expr(detail::ExprNode node);

  std::shared_ptr<const detail::ExprNode> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr pow(const Expr& a, double exponent);
/// |x|, with derivative 0 at x = 0.
Expr abs(const Expr& a);
Expr sigmoid(const Expr& a);
/// log(1 + e^x), computed without overflow.
Expr log1pexp(const Expr& a);

Expr dot(const Expr& a, const Expr& b);
Expr squared_norm(const Expr& a);
/// Euclidean norm; the gradient at the origin is taken to be zero.
Expr norm(const Expr& a);
Expr cumsum(const Expr& a);
Expr sum(const Expr& a);
/// Row-wise dot products of a constant matrix with a vector expression.
Expr matvec(std::shared_ptr<const Matrix> matrix, const Expr& a);

/// Elementwise application by name ("exp", "log", "sqrt", "abs", "neg",
/// "sigmoid", "log1pexp"). Unknown names throw ConstructionError.
Expr apply(std::string_view name, const Expr& a);

/// Declares how an objective value may be interpreted by model selection.
enum class LossScale : std::uint8_t {
  Generic,
  NegativeLogLikelihood,
  HalfResidualSumOfSquares,
};

/// One compiled instruction; operands always precede the instruction.
struct Instruction {
  Op op = Op::Constant;
  std::array<std::int32_t, 2> args{-1, -1};
  Index size = 1;
  double scalar = 0.0;
  std::shared_ptr<const Vector> values;
  std::shared_ptr<const Matrix> matrix;
};

/// A compiled objective. Immutable; shared by every tape evaluating it.
class Program {
 public:
  explicit Program(const Expr& root);

  Index dimension() const { return dimension_; }
  std::size_t parameter_node() const { return parameter_node_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }

 private:
  std::vector<Instruction> instructions_;
  Index dimension_ = 0;
  std::size_t parameter_node_ = 0;
};

/// Per-evaluation state for a Program: one value and one adjoint per node.
///
/// A tape may be reused across evaluations; buffers are kept between calls.
/// Not thread safe: each concurrent solve owns its own tape.
class Tape {
 public:
  explicit Tape(std::shared_ptr<const Program> program);

  /// Records all node values at theta and returns the objective value.
  double forward(const Vector& theta);

  /// Reverse sweep over the last forward pass. When coords is non-null only
  /// those gradient entries are guaranteed; others may be left stale.
  void backward(Vector& gradient, const std::vector<Index>* coords = nullptr);

  std::size_t size() const { return program_->instructions().size(); }
  const Instruction& node(std::size_t i) const { return program_->instructions()[i]; }
  const Vector& value(std::size_t i) const { return values_[i]; }

  /// Number of nodes visited by the most recent reverse sweep.
  std::size_t last_sweep_visits() const { return visits_; }

 private:
  std::shared_ptr<const Program> program_;
  std::vector<Vector> values_;
  std::vector<Vector> adjoints_;
  std::vector<Index> nonzero_scratch_;
  std::size_t visits_ = 0;
  bool recorded_ = false;
};

/// Evaluates f and its gradient. The single contract every solver consumes.
///
/// Copies share the same immutable program or functions. Per-evaluation
/// state lives in an Evaluator, obtained through evaluator().
class ObjectiveOracle {
 public:
  using ValueFunction = std::function<double(const Vector&)>;
  using GradientFunction = std::function<Vector(const Vector&)>;

  class Evaluator {
   public:
    double value(const Vector& theta);
    double value_and_gradient(const Vector& theta, Vector& gradient);
    /// Gradient entries outside coords are unspecified.
    double value_and_gradient(const Vector& theta, const std::vector<Index>& coords,
                              Vector& gradient);
    std::size_t evaluations() const { return evaluations_; }

   private:
    friend class ObjectiveOracle;
    explicit Evaluator(const ObjectiveOracle& oracle);

    Index dimension_;
    ValueFunction value_fn_;
    GradientFunction gradient_fn_;
    std::optional<Tape> tape_;
    std::size_t evaluations_ = 0;
  };

  ObjectiveOracle(const Expr& objective, LossScale scale = LossScale::Generic);

  /// Bypasses the tape with user-supplied value and analytic gradient.
  static ObjectiveOracle from_functions(Index dimension, ValueFunction value,
                                        GradientFunction gradient,
                                        LossScale scale = LossScale::Generic);

  Index dimension() const { return dimension_; }
  LossScale scale() const { return scale_; }

  Evaluator evaluator() const { return Evaluator(*this); }

  double value(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;

 private:
  ObjectiveOracle() = default;

  Index dimension_ = 0;
  LossScale scale_ = LossScale::Generic;
  std::shared_ptr<const Program> program_;
  ValueFunction value_fn_;
  GradientFunction gradient_fn_;
};

ObjectiveOracle build_objective(const Expr& objective, LossScale scale = LossScale::Generic);

enum class StepRule { Absolute, Relative };

/// Central finite differences. With StepRule::Relative coordinate i uses
/// step * (1 + |theta_i|).
Vector fd_gradient(const ObjectiveOracle& oracle, const Vector& theta, double step,
                   StepRule rule = StepRule::Absolute);

}  // namespace sco
