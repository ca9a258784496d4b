#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "sco/ad.hpp"
#include "sco/errors.hpp"
#include "support.hpp"

using namespace sco;
using sco::testing::gaussian;
using sco::testing::rel_err;

TEST(Ad, ProductPlusExp) {
  const Expr t = Expr::parameter(2);
  const auto f = build_objective(t[0] * t[1] + exp(t[0]));
  const Vector g = f.gradient(Vector::Map(std::vector<double>{0.0, 1.0}.data(), 2));
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
  EXPECT_DOUBLE_EQ(f.value(Vector::Zero(2)), 1.0);
}

TEST(Ad, LeastSquaresGradient) {
  const Vector y = (Vector(2) << 1.0, 2.0).finished();
  const auto f = sco::testing::ols_oracle(Matrix::Identity(2, 2), y);
  const Vector g = f.gradient(Vector::Zero(2));
  EXPECT_DOUBLE_EQ(g[0], -1.0);
  EXPECT_DOUBLE_EQ(g[1], -2.0);
}

TEST(Ad, CumsumNormMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  const Vector data = gaussian(rng, 30);
  const Expr t = Expr::parameter(30);
  const auto f = build_objective(norm(Expr::constant(data) - cumsum(t)));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector theta = gaussian(rng, 30);
    const Vector fd = fd_gradient(f, theta, 1e-6, StepRule::Relative);
    EXPECT_LE(rel_err(f.gradient(theta), fd), 1e-6);
  }
}

TEST(Ad, CumsumGradientClosedForm) {
  // d/dtheta_j 1/2 |d - cumsum(theta)|^2 = -sum_{i >= j} r_i
  std::mt19937_64 rng(3);
  const Vector d = gaussian(rng, 12);
  const Vector theta = gaussian(rng, 12);
  const Expr t = Expr::parameter(12);
  const auto f = build_objective(0.5 * squared_norm(Expr::constant(d) - cumsum(t)));
  Vector c(12);
  double acc = 0.0;
  for (Index i = 0; i < 12; ++i) c[i] = (acc += theta[i]);
  const Vector r = d - c;
  Vector expected(12);
  acc = 0.0;
  for (Index j = 11; j >= 0; --j) expected[j] = -(acc += r[j]);
  EXPECT_LE((f.gradient(theta) - expected).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(FiniteDifference, Square) {
  const Expr t = Expr::parameter(1);
  const auto f = build_objective(t[0] * t[0]);
  const Vector g = fd_gradient(f, Vector::Constant(1, 3.0), 1e-5);
  EXPECT_NEAR(g[0], 6.0, 1e-8);
}

TEST(FiniteDifference, ConstantObjectiveHasZeroGradient) {
  const Expr t = Expr::parameter(4);
  const auto f = build_objective(0.0 * sum(t) + 5.0);
  const Vector g = fd_gradient(f, Vector::Ones(4), 1e-5);
  EXPECT_EQ(g.lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(f.gradient(Vector::Ones(4)).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(FiniteDifference, LogisticSmallInstance) {
  std::mt19937_64 rng(11);
  const Matrix x = gaussian(rng, 5, 4);
  const Vector y = (Vector(5) << 1, 0, 0, 1, 1).finished();
  const Expr t = Expr::parameter(4);
  const Expr eta = matvec(std::make_shared<const Matrix>(x), t);
  const auto f = build_objective(sum(log1pexp(eta)) - dot(Expr::constant(y), eta),
                                 LossScale::NegativeLogLikelihood);
  const Vector theta = gaussian(rng, 4);
  const Vector ad = f.gradient(theta);
  const Vector fd = fd_gradient(f, theta, 1e-6);
  EXPECT_LE((ad - fd).lpNorm<Eigen::Infinity>(), 1e-6 * (1.0 + ad.lpNorm<Eigen::Infinity>()));

  // Independent closed form: X' (sigmoid(X theta) - y).
  const Vector p = (1.0 / (1.0 + (-(x * theta).array()).exp())).matrix();
  EXPECT_LE((ad - x.transpose() * (p - y)).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Ad, ElementaryDerivatives) {
  // Each unary op against its textbook derivative at a point inside the domain.
  const double x0 = 0.7;
  const Vector at = Vector::Constant(1, x0);
  const Expr t = Expr::parameter(1);
  struct Case {
    Expr f;
    double derivative;
  };
  const double s = 1.0 / (1.0 + std::exp(-x0));
  const Case cases[] = {
      {exp(t[0]), std::exp(x0)},
      {log(t[0]), 1.0 / x0},
      {sqrt(t[0]), 0.5 / std::sqrt(x0)},
      {pow(t[0], 2.5), 2.5 * std::pow(x0, 1.5)},
      {abs(-t[0]), 1.0},
      {sigmoid(t[0]), s * (1.0 - s)},
      {log1pexp(t[0]), s},
      {1.0 / t[0], -1.0 / (x0 * x0)},
      {t[0] - 3.0 * t[0], -2.0},
      {apply("exp", t[0]), std::exp(x0)},
  };
  for (const Case& c : cases) {
    EXPECT_NEAR(build_objective(c.f).gradient(at)[0], c.derivative, 1e-12);
  }
}

TEST(Ad, SubgradientConventions) {
  const Expr t = Expr::parameter(3);
  EXPECT_EQ(build_objective(sum(abs(t))).gradient(Vector::Zero(3)).lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(build_objective(norm(t)).gradient(Vector::Zero(3)).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Ad, StableLogisticPieces) {
  const Expr t = Expr::parameter(1);
  const auto f = build_objective(log1pexp(t[0]));
  EXPECT_DOUBLE_EQ(f.value(Vector::Constant(1, 800.0)), 800.0);
  EXPECT_NEAR(f.value(Vector::Constant(1, -800.0)), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(f.gradient(Vector::Constant(1, 800.0))[0], 1.0);
}

TEST(Ad, Linearity) {
  std::mt19937_64 rng(5);
  const Matrix x = gaussian(rng, 8, 5);
  const Vector y = gaussian(rng, 8);
  const Expr t = Expr::parameter(5);
  const Expr f = 0.5 * squared_norm(Expr::constant(y) - matvec(std::make_shared<const Matrix>(x), t));
  const Expr g = sum(log1pexp(t)) + norm(cumsum(t));
  const double a = 2.5;
  const double b = -0.75;
  const auto of = build_objective(f);
  const auto og = build_objective(g);
  const auto oh = build_objective(a * f + b * g);
  for (int k = 0; k < 20; ++k) {
    const Vector theta = gaussian(rng, 5);
    const Vector expected = a * of.gradient(theta) + b * og.gradient(theta);
    EXPECT_LE((oh.gradient(theta) - expected).lpNorm<Eigen::Infinity>(),
              1e-12 * (1.0 + expected.lpNorm<Eigen::Infinity>()));
  }
}

TEST(Ad, ReplayIsBitIdentical) {
  std::mt19937_64 rng(9);
  const Expr t = Expr::parameter(6);
  const auto f = build_objective(sum(sigmoid(t) * exp(t)) + squared_norm(cumsum(t)));
  const Vector theta = gaussian(rng, 6);
  auto ev = f.evaluator();
  Vector g1(6), g2(6);
  const double v1 = ev.value_and_gradient(theta, g1);
  const double v2 = ev.value_and_gradient(theta, g2);
  EXPECT_EQ(v1, v2);
  EXPECT_TRUE((g1.array() == g2.array()).all());
  EXPECT_EQ(v1, f.value(theta));
}

TEST(Ad, SharedSubexpressionAccumulates) {
  const Expr t = Expr::parameter(1);
  const Expr u = t[0] * t[0];
  const auto f = build_objective(u * u + u);  // x^4 + x^2
  EXPECT_NEAR(f.gradient(Vector::Constant(1, 2.0))[0], 4 * 8.0 + 2 * 2.0, 1e-12);
}

TEST(Tape, TopologicalOrderAndSingleSweep) {
  const Expr t = Expr::parameter(3);
  const Expr u = exp(t);
  const auto program = std::make_shared<const Program>(sum(u * u) + dot(u, t));
  for (std::size_t i = 0; i < program->instructions().size(); ++i) {
    for (auto a : program->instructions()[i].args) EXPECT_LT(a, static_cast<std::int32_t>(i));
  }
  Tape tape(program);
  tape.forward(Vector::Ones(3));
  Vector g(3);
  tape.backward(g);
  EXPECT_EQ(tape.last_sweep_visits(), tape.size());
}

TEST(Ad, RestrictedGradientMatchesFull) {
  std::mt19937_64 rng(21);
  const Matrix x = gaussian(rng, 20, 40);
  const Vector y = gaussian(rng, 20);
  const auto f = sco::testing::ols_oracle(x, y);
  Vector theta = Vector::Zero(40);
  theta[3] = 1.0;
  theta[17] = -2.0;
  const std::vector<Index> coords{3, 5, 17, 39};
  auto ev = f.evaluator();
  Vector g(40);
  ev.value_and_gradient(theta, coords, g);
  const Vector full = f.gradient(theta);
  for (Index j : coords) EXPECT_NEAR(g[j], full[j], 1e-12);
}

TEST(AdErrors, Construction) {
  const Expr a = Expr::parameter(3);
  const Expr b = Expr::parameter(3);
  EXPECT_THROW(apply("tanh", a), ConstructionError);
  EXPECT_THROW(a + Expr::constant(Vector::Ones(2)), ConstructionError);
  EXPECT_THROW(build_objective(a), ConstructionError);                  // not scalar
  EXPECT_THROW(build_objective(sum(a) + sum(b)), ConstructionError);    // two parameter vectors
  EXPECT_THROW(build_objective(Expr(1.0) + 2.0), ConstructionError);    // no parameter
  EXPECT_THROW(a[3], ConstructionError);
  EXPECT_THROW(Expr::parameter(0), ConstructionError);
}

TEST(AdErrors, EvaluationCarriesNode) {
  const Expr t = Expr::parameter(2);
  const auto f = build_objective(sum(log(t)));
  try {
    f.value(Vector::Constant(2, -1.0));
    FAIL() << "expected an evaluation error";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.op(), "log");
  }
  const auto g = build_objective(sum(1.0 / t));
  EXPECT_THROW(g.value(Vector::Zero(2)), EvaluationError);
  const auto h = build_objective(sum(exp(t)));
  EXPECT_THROW(h.value(Vector::Constant(2, 1000.0)), EvaluationError);
  const auto k = build_objective(sum(sqrt(t)));
  EXPECT_THROW(k.value(Vector::Constant(2, -0.5)), EvaluationError);
}

TEST(Ad, AnalyticOracleBypassesTape) {
  std::mt19937_64 rng(2);
  const Matrix x = gaussian(rng, 10, 4);
  const Vector y = gaussian(rng, 10);
  const auto tape = sco::testing::ols_oracle(x, y);
  const auto analytic = sco::testing::ols_oracle_analytic(x, y);
  const Vector theta = gaussian(rng, 4);
  EXPECT_NEAR(tape.value(theta), analytic.value(theta), 1e-12);
  EXPECT_LE((tape.gradient(theta) - analytic.gradient(theta)).lpNorm<Eigen::Infinity>(), 1e-12);
}
