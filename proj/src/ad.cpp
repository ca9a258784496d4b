#include "sco/ad.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace sco {

namespace detail {

struct ExprNode {
  Op op = Op::Constant;
  std::array<std::shared_ptr<const ExprNode>, 2> operands;
  Index size = 1;
  double scalar = 0.0;
  std::shared_ptr<const Vector> values;
  std::shared_ptr<const Matrix> matrix;
};

}  // namespace detail

using detail::ExprNode;

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Parameter: return "parameter";
    case Op::Constant: return "constant";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Pow: return "pow";
    case Op::Abs: return "abs";
    case Op::Sigmoid: return "sigmoid";
    case Op::Log1pExp: return "log1pexp";
    case Op::Dot: return "dot";
    case Op::SquaredNorm: return "squared_norm";
    case Op::Norm: return "norm";
    case Op::CumSum: return "cumsum";
    case Op::Sum: return "sum";
    case Op::MatVec: return "matvec";
    case Op::Element: return "element";
  }
  return "unknown";
}

Expr make_expr(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

namespace {

Expr unary(Op op, const Expr& a, Index size) {
  ExprNode node;
  node.op = op;
  node.operands[0] = a.node();
  node.size = size;
  return make_expr(std::move(node));
}

Expr elementwise(Op op, const Expr& a) { return unary(op, a, a.size()); }

Expr binary(Op op, const Expr& a, const Expr& b) {
  Index size = 0;
  if (a.size() == b.size() || b.size() == 1) {
    size = a.size();
  } else if (a.size() == 1) {
    size = b.size();
  } else {
    throw ConstructionError(std::string(op_name(op)) + ": operand sizes " +
                            std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                            " do not broadcast");
  }
  ExprNode node;
  node.op = op;
  node.operands = {a.node(), b.node()};
  node.size = size;
  return make_expr(std::move(node));
}

}  // namespace

Expr::Expr(double constant) {
  ExprNode node;
  node.op = Op::Constant;
  node.size = 1;
  node.values = std::make_shared<const Vector>(Vector::Constant(1, constant));
  node_ = std::make_shared<const ExprNode>(std::move(node));
}

Expr Expr::parameter(Index dimension) {
  if (dimension < 1) throw ConstructionError("parameter dimension must be positive");
  ExprNode node;
  node.op = Op::Parameter;
  node.size = dimension;
  return make_expr(std::move(node));
}

Expr Expr::constant(Vector values) {
  if (values.size() < 1) throw ConstructionError("constant must have at least one entry");
  ExprNode node;
  node.op = Op::Constant;
  node.size = values.size();
  node.values = std::make_shared<const Vector>(std::move(values));
  return make_expr(std::move(node));
}

Index Expr::size() const { return node_->size; }
Op Expr::op() const { return node_->op; }

Expr Expr::operator[](Index i) const {
  if (i < 0 || i >= size()) {
    throw ConstructionError("element index " + std::to_string(i) + " out of range for size " +
                            std::to_string(size()));
  }
  ExprNode node;
  node.op = Op::Element;
  node.operands[0] = node_;
  node.size = 1;
  node.scalar = static_cast<double>(i);
  return make_expr(std::move(node));
}

Expr operator+(const Expr& a, const Expr& b) { return binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return elementwise(Op::Neg, a); }

Expr exp(const Expr& a) { return elementwise(Op::Exp, a); }
Expr log(const Expr& a) { return elementwise(Op::Log, a); }
Expr sqrt(const Expr& a) { return elementwise(Op::Sqrt, a); }
Expr abs(const Expr& a) { return elementwise(Op::Abs, a); }
Expr sigmoid(const Expr& a) { return elementwise(Op::Sigmoid, a); }
Expr log1pexp(const Expr& a) { return elementwise(Op::Log1pExp, a); }

Expr pow(const Expr& a, double exponent) {
  if (!std::isfinite(exponent)) throw ConstructionError("pow: exponent must be finite");
  ExprNode node;
  node.op = Op::Pow;
  node.operands[0] = a.node();
  node.size = a.size();
  node.scalar = exponent;
  return make_expr(std::move(node));
}

Expr dot(const Expr& a, const Expr& b) {
  if (a.size() != b.size()) {
    throw ConstructionError("dot: sizes " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()) + " differ");
  }
  ExprNode node;
  node.op = Op::Dot;
  node.operands = {a.node(), b.node()};
  node.size = 1;
  return make_expr(std::move(node));
}

Expr squared_norm(const Expr& a) { return unary(Op::SquaredNorm, a, 1); }
Expr norm(const Expr& a) { return unary(Op::Norm, a, 1); }
Expr cumsum(const Expr& a) { return elementwise(Op::CumSum, a); }
Expr sum(const Expr& a) { return unary(Op::Sum, a, 1); }

Expr matvec(std::shared_ptr<const Matrix> matrix, const Expr& a) {
  if (!matrix) throw ConstructionError("matvec: null matrix");
  if (matrix->cols() != a.size()) {
    throw ConstructionError("matvec: matrix has " + std::to_string(matrix->cols()) +
                            " columns but operand has size " + std::to_string(a.size()));
  }
  if (matrix->rows() < 1) throw ConstructionError("matvec: matrix has no rows");
  ExprNode node;
  node.op = Op::MatVec;
  node.operands[0] = a.node();
  node.size = matrix->rows();
  node.matrix = std::move(matrix);
  return make_expr(std::move(node));
}

Expr apply(std::string_view name, const Expr& a) {
  if (name == "exp") return exp(a);
  if (name == "log") return log(a);
  if (name == "sqrt") return sqrt(a);
  if (name == "abs") return abs(a);
  if (name == "neg") return -a;
  if (name == "sigmoid") return sigmoid(a);
  if (name == "log1pexp") return log1pexp(a);
  throw ConstructionError("unsupported operation '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Program

Program::Program(const Expr& root) {
  if (root.size() != 1) {
    throw ConstructionError("objective must be scalar, got size " + std::to_string(root.size()));
  }

  std::unordered_map<const ExprNode*, std::int32_t> ids;
  const ExprNode* parameter = nullptr;

  struct Frame {
    const ExprNode* node;
    int next;
  };
  std::vector<Frame> stack{{root.node().get(), 0}};
  // Iterative post-order walk; long sum chains would overflow a recursive one.
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (ids.contains(top.node)) {
      stack.pop_back();
      continue;
    }
    const ExprNode* pending = nullptr;
    while (top.next < 2) {
      const ExprNode* child = top.node->operands[top.next++].get();
      if (child != nullptr && !ids.contains(child)) {
        pending = child;
        break;
      }
    }
    if (pending != nullptr) {
      stack.push_back({pending, 0});
      continue;
    }

    const ExprNode* node = top.node;
    stack.pop_back();

    Instruction ins;
    ins.op = node->op;
    ins.size = node->size;
    ins.scalar = node->scalar;
    ins.values = node->values;
    ins.matrix = node->matrix;
    for (int k = 0; k < 2; ++k) {
      if (node->operands[k]) ins.args[k] = ids.at(node->operands[k].get());
    }
    if (node->op == Op::Parameter) {
      if (parameter != nullptr && parameter != node) {
        throw ConstructionError("objective references more than one parameter vector");
      }
      parameter = node;
      parameter_node_ = instructions_.size();
      dimension_ = node->size;
    }
    ids.emplace(node, static_cast<std::int32_t>(instructions_.size()));
    instructions_.push_back(std::move(ins));
  }

  if (parameter == nullptr) {
    throw ConstructionError("objective does not reference a parameter vector");
  }
}

// ---------------------------------------------------------------------------
// Tape

namespace {

// Accumulates an output-sized contribution into an operand that may have been
// broadcast from a scalar.
template <typename Contribution>
void accumulate(Vector& adjoint, const Contribution& contribution) {
  if (adjoint.size() == contribution.size()) {
    adjoint.array() += contribution;
  } else {
    adjoint[0] += contribution.sum();
  }
}

Eigen::ArrayXd broadcast(const Vector& v, Index size) {
  if (v.size() == size) return v.array();
  return Eigen::ArrayXd::Constant(size, v[0]);
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

Tape::Tape(std::shared_ptr<const Program> program)
    : program_(std::move(program)),
      values_(program_->instructions().size()),
      adjoints_(program_->instructions().size()) {}

double Tape::forward(const Vector& theta) {
  const auto& code = program_->instructions();
  if (theta.size() != program_->dimension()) {
    throw std::invalid_argument("theta has size " + std::to_string(theta.size()) +
                                ", objective expects " +
                                std::to_string(program_->dimension()));
  }
  recorded_ = false;

  for (std::size_t i = 0; i < code.size(); ++i) {
    const Instruction& ins = code[i];
    Vector& out = values_[i];
    const auto fail = [&](const std::string& what) {
      throw EvaluationError(i, std::string(op_name(ins.op)), what);
    };
    const Vector* a = ins.args[0] >= 0 ? &values_[ins.args[0]] : nullptr;
    const Vector* b = ins.args[1] >= 0 ? &values_[ins.args[1]] : nullptr;

    switch (ins.op) {
      case Op::Parameter:
        out = theta;
        break;
      case Op::Constant:
        out = *ins.values;
        break;
      case Op::Add:
        out = (broadcast(*a, ins.size) + broadcast(*b, ins.size)).matrix();
        break;
      case Op::Sub:
        out = (broadcast(*a, ins.size) - broadcast(*b, ins.size)).matrix();
        break;
      case Op::Mul:
        out = (broadcast(*a, ins.size) * broadcast(*b, ins.size)).matrix();
        break;
      case Op::Div:
        if ((b->array() == 0.0).any()) fail("division by zero");
        out = (broadcast(*a, ins.size) / broadcast(*b, ins.size)).matrix();
        break;
      case Op::Neg:
        out = -*a;
        break;
      case Op::Exp:
        out = a->array().exp().matrix();
        break;
      case Op::Log:
        if ((a->array() <= 0.0).any()) fail("log of a nonpositive value");
        out = a->array().log().matrix();
        break;
      case Op::Sqrt:
        if ((a->array() < 0.0).any()) fail("sqrt of a negative value");
        out = a->array().sqrt().matrix();
        break;
      case Op::Pow: {
        const double e = ins.scalar;
        const bool integral = std::floor(e) == e;
        if (!integral && (a->array() < 0.0).any()) fail("non-integer power of a negative value");
        if (e < 0.0 && (a->array() == 0.0).any()) fail("negative power of zero");
        out = a->array().pow(e).matrix();
        break;
      }
      case Op::Abs:
        out = a->cwiseAbs();
        break;
      case Op::Sigmoid:
        out = a->unaryExpr(&stable_sigmoid);
        break;
      case Op::Log1pExp:
        out = a->unaryExpr(&stable_log1pexp);
        break;
      case Op::Dot:
        out.resize(1);
        out[0] = a->dot(*b);
        break;
      case Op::SquaredNorm:
        out.resize(1);
        out[0] = a->squaredNorm();
        break;
      case Op::Norm:
        out.resize(1);
        out[0] = a->norm();
        break;
      case Op::CumSum: {
        out.resize(a->size());
        double running = 0.0;
        for (Index k = 0; k < a->size(); ++k) {
          running += (*a)[k];
          out[k] = running;
        }
        break;
      }
      case Op::Sum:
        out.resize(1);
        out[0] = a->sum();
        break;
      case Op::MatVec: {
        const Matrix& m = *ins.matrix;
        nonzero_scratch_.clear();
        for (Index j = 0; j < a->size(); ++j) {
          if ((*a)[j] != 0.0) nonzero_scratch_.push_back(j);
        }
        if (4 * static_cast<Index>(nonzero_scratch_.size()) < a->size()) {
          out.setZero(m.rows());
          for (Index j : nonzero_scratch_) out.noalias() += (*a)[j] * m.col(j);
        } else {
          out.noalias() = m * *a;
        }
        break;
      }
      case Op::Element:
        out.resize(1);
        out[0] = (*a)[static_cast<Index>(ins.scalar)];
        break;
    }
    if (!out.allFinite()) fail("non-finite value");
  }
  recorded_ = true;
  return values_.back()[0];
}

void Tape::backward(Vector& gradient, const std::vector<Index>* coords) {
  if (!recorded_) throw std::logic_error("Tape::backward called without a forward pass");
  const auto& code = program_->instructions();
  const std::size_t parameter = program_->parameter_node();

  for (std::size_t i = 0; i < code.size(); ++i) adjoints_[i].setZero(values_[i].size());
  adjoints_.back()[0] = 1.0;
  visits_ = 0;

  for (std::size_t i = code.size(); i-- > 0;) {
    ++visits_;
    const Instruction& ins = code[i];
    const Vector& adj = adjoints_[i];
    const Vector& out = values_[i];
    if (ins.args[0] < 0) continue;
    const auto fail = [&](const std::string& what) {
      throw EvaluationError(i, std::string(op_name(ins.op)), what);
    };
    const Vector& a = values_[ins.args[0]];
    Vector& adj_a = adjoints_[ins.args[0]];

    switch (ins.op) {
      case Op::Parameter:
      case Op::Constant:
        break;
      case Op::Add:
      case Op::Sub: {
        accumulate(adj_a, adj.array());
        Vector& adj_b = adjoints_[ins.args[1]];
        if (ins.op == Op::Add) {
          accumulate(adj_b, adj.array());
        } else {
          accumulate(adj_b, -adj.array());
        }
        break;
      }
      case Op::Mul: {
        const Vector& b = values_[ins.args[1]];
        accumulate(adj_a, adj.array() * broadcast(b, ins.size));
        accumulate(adjoints_[ins.args[1]], adj.array() * broadcast(a, ins.size));
        break;
      }
      case Op::Div: {
        const Vector& b = values_[ins.args[1]];
        const Eigen::ArrayXd bb = broadcast(b, ins.size);
        accumulate(adj_a, adj.array() / bb);
        accumulate(adjoints_[ins.args[1]], -adj.array() * out.array() / bb);
        break;
      }
      case Op::Neg:
        adj_a -= adj;
        break;
      case Op::Exp:
        adj_a.array() += adj.array() * out.array();
        break;
      case Op::Log:
        adj_a.array() += adj.array() / a.array();
        break;
      case Op::Sqrt:
        for (Index k = 0; k < a.size(); ++k) {
          if (adj[k] == 0.0) continue;
          if (out[k] == 0.0) fail("sqrt is not differentiable at 0");
          adj_a[k] += adj[k] * 0.5 / out[k];
        }
        break;
      case Op::Pow: {
        const double e = ins.scalar;
        if (e == 0.0) break;
        for (Index k = 0; k < a.size(); ++k) {
          if (adj[k] == 0.0) continue;
          const double local = e * std::pow(a[k], e - 1.0);
          if (!std::isfinite(local)) fail("pow is not differentiable at this point");
          adj_a[k] += adj[k] * local;
        }
        break;
      }
      case Op::Abs:
        // Subgradient 0 at the kink.
        adj_a.array() += adj.array() * a.array().sign();
        break;
      case Op::Sigmoid:
        adj_a.array() += adj.array() * out.array() * (1.0 - out.array());
        break;
      case Op::Log1pExp:
        adj_a.array() += adj.array() * a.unaryExpr(&stable_sigmoid).array();
        break;
      case Op::Dot: {
        const Vector& b = values_[ins.args[1]];
        adj_a.noalias() += adj[0] * b;
        adjoints_[ins.args[1]].noalias() += adj[0] * a;
        break;
      }
      case Op::SquaredNorm:
        adj_a.noalias() += (2.0 * adj[0]) * a;
        break;
      case Op::Norm:
        if (out[0] > 0.0) adj_a.noalias() += (adj[0] / out[0]) * a;
        break;
      case Op::CumSum: {
        double running = 0.0;
        for (Index k = a.size(); k-- > 0;) {
          running += adj[k];
          adj_a[k] += running;
        }
        break;
      }
      case Op::Sum:
        adj_a.array() += adj[0];
        break;
      case Op::MatVec: {
        const Matrix& m = *ins.matrix;
        if (coords != nullptr && static_cast<std::size_t>(ins.args[0]) == parameter) {
          for (Index j : *coords) adj_a[j] += m.col(j).dot(adj);
        } else {
          adj_a.noalias() += m.transpose() * adj;
        }
        break;
      }
      case Op::Element:
        adj_a[static_cast<Index>(ins.scalar)] += adj[0];
        break;
    }
  }
  gradient = adjoints_[parameter];
}

// ---------------------------------------------------------------------------
// ObjectiveOracle

ObjectiveOracle::ObjectiveOracle(const Expr& objective, LossScale scale)
    : scale_(scale), program_(std::make_shared<const Program>(objective)) {
  dimension_ = program_->dimension();
}

ObjectiveOracle ObjectiveOracle::from_functions(Index dimension, ValueFunction value,
                                                GradientFunction gradient, LossScale scale) {
  if (dimension < 1) throw ConstructionError("dimension must be positive");
  if (!value || !gradient) throw ConstructionError("value and gradient functions are required");
  ObjectiveOracle oracle;
  oracle.dimension_ = dimension;
  oracle.scale_ = scale;
  oracle.value_fn_ = std::move(value);
  oracle.gradient_fn_ = std::move(gradient);
  return oracle;
}

ObjectiveOracle::Evaluator::Evaluator(const ObjectiveOracle& oracle)
    : dimension_(oracle.dimension_),
      value_fn_(oracle.value_fn_),
      gradient_fn_(oracle.gradient_fn_) {
  if (oracle.program_) tape_.emplace(oracle.program_);
}

double ObjectiveOracle::Evaluator::value(const Vector& theta) {
  ++evaluations_;
  if (tape_) return tape_->forward(theta);
  if (theta.size() != dimension_) throw std::invalid_argument("theta has the wrong size");
  return value_fn_(theta);
}

double ObjectiveOracle::Evaluator::value_and_gradient(const Vector& theta, Vector& gradient) {
  ++evaluations_;
  if (tape_) {
    const double f = tape_->forward(theta);
    tape_->backward(gradient);
    return f;
  }
  if (theta.size() != dimension_) throw std::invalid_argument("theta has the wrong size");
  gradient = gradient_fn_(theta);
  if (gradient.size() != dimension_) {
    throw std::runtime_error("gradient function returned a vector of the wrong size");
  }
  return value_fn_(theta);
}

double ObjectiveOracle::Evaluator::value_and_gradient(const Vector& theta,
                                                      const std::vector<Index>& coords,
                                                      Vector& gradient) {
  if (!tape_) return value_and_gradient(theta, gradient);
  ++evaluations_;
  const double f = tape_->forward(theta);
  tape_->backward(gradient, &coords);
  return f;
}

double ObjectiveOracle::value(const Vector& theta) const { return evaluator().value(theta); }

Vector ObjectiveOracle::gradient(const Vector& theta) const {
  Vector g;
  evaluator().value_and_gradient(theta, g);
  return g;
}

ObjectiveOracle build_objective(const Expr& objective, LossScale scale) {
  return ObjectiveOracle(objective, scale);
}

Vector fd_gradient(const ObjectiveOracle& oracle, const Vector& theta, double step,
                   StepRule rule) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  auto eval = oracle.evaluator();
  Vector probe = theta;
  Vector g(theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    const double h = rule == StepRule::Relative ? step * (1.0 + std::abs(theta[i])) : step;
    probe[i] = theta[i] + h;
    const double up = eval.value(probe);
    probe[i] = theta[i] - h;
    const double down = eval.value(probe);
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace sco
