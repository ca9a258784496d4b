#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sco/model_zoo.hpp"
#include "support.hpp"

using namespace sco;
using sco::testing::gaussian;

namespace {

ModelSpec small(ModelKind kind, std::uint64_t seed = 0) {
  ModelSpec spec;
  spec.kind = kind;
  spec.n = 40;
  spec.p = kind == ModelKind::Ising ? 5 : (kind == ModelKind::TrendFilter ? 40 : 12);
  spec.s_true = 3;
  spec.seed = seed;
  return spec;
}

constexpr ModelKind kKinds[] = {ModelKind::Linear, ModelKind::Logistic, ModelKind::TrendFilter,
                                ModelKind::Ising};

// Ising negative log pseudo-likelihood written out with explicit loops.
double ising_reference(const Matrix& z, const Vector& theta) {
  const Index q = z.cols();
  double total = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index a = 0; a < q; ++a) {
      double field = 0.0;
      for (Index b = 0; b < q; ++b) {
        if (b == a) continue;
        field += theta[ising_edge_index(q, std::min(a, b), std::max(a, b))] * z(i, b);
      }
      total += std::log1p(std::exp(-2.0 * z(i, a) * field));
    }
  }
  return total;
}

}  // namespace

TEST(ModelZoo, GeneratorsAreDeterministic) {
  for (ModelKind kind : kKinds) {
    const Dataset a = generate(small(kind, 5));
    const Dataset b = generate(small(kind, 5));
    const Dataset c = generate(small(kind, 6));
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.theta_true, b.theta_true);
    EXPECT_EQ(a.true_support, b.true_support);
    EXPECT_FALSE(a.theta_true == c.theta_true && a.y == c.y && a.x == c.x) << model_name(kind);
  }
}

TEST(ModelZoo, PlantedSupportInvariants) {
  for (ModelKind kind : kKinds) {
    const Dataset d = generate(small(kind, 1));
    EXPECT_EQ(static_cast<Index>(d.true_support.size()), 3);
    for (Index j = 0; j < d.theta_true.size(); ++j) {
      const bool in = std::binary_search(d.true_support.begin(), d.true_support.end(), j);
      EXPECT_EQ(d.theta_true[j] != 0.0, in) << model_name(kind) << " coord " << j;
    }
  }
}

TEST(ModelZoo, LinearNoiselessAndValues) {
  ModelSpec spec = small(ModelKind::Linear);
  spec.signal = std::numeric_limits<double>::infinity();
  const Dataset d = generate(spec);
  EXPECT_LE((d.y - d.x * d.theta_true).lpNorm<Eigen::Infinity>(), 1e-12);
  const auto f = objective_linear(d);
  EXPECT_NEAR(f.value(d.theta_true), 0.0, 1e-20);
  EXPECT_NEAR(f.value(Vector::Zero(12)), 0.5 * d.y.squaredNorm(), 1e-12);
  for (Index j : d.true_support) {
    EXPECT_GE(std::abs(d.theta_true[j]), 1.0);
    EXPECT_LE(std::abs(d.theta_true[j]), 2.0);
  }
}

TEST(ModelZoo, LinearSnr) {
  ModelSpec spec;
  spec.n = 20000;
  spec.p = 10;
  spec.s_true = 3;
  spec.signal = 4.0;
  const Dataset d = generate(spec);
  const Vector signal = d.x * d.theta_true;
  const Vector noise = d.y - signal;
  const auto var = [](const Vector& v) {
    return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
  };
  EXPECT_NEAR(var(signal) / var(noise), 4.0, 0.3);
}

TEST(ModelZoo, LogisticAtZero) {
  const Dataset d = generate(small(ModelKind::Logistic));
  EXPECT_NEAR(objective_logistic(d).value(Vector::Zero(12)), 40 * std::log(2.0), 1e-10);
  for (Index i = 0; i < d.y.size(); ++i) EXPECT_TRUE(d.y[i] == 0.0 || d.y[i] == 1.0);
}

TEST(ModelZoo, IsingZeroCouplings) {
  ModelSpec spec = small(ModelKind::Ising);
  const Dataset d = generate(spec);
  EXPECT_NEAR(objective_ising(d).value(Vector::Zero(10)), 40 * 5 * std::log(2.0), 1e-10);
  EXPECT_EQ(parameter_dimension(spec), 10);
  for (Index i = 0; i < d.x.rows(); ++i)
    for (Index a = 0; a < d.x.cols(); ++a) EXPECT_EQ(std::abs(d.x(i, a)), 1.0);
}

TEST(ModelZoo, IsingMatchesLoopReference) {
  std::mt19937_64 rng(4);
  const Dataset d = generate(small(ModelKind::Ising, 2));
  const auto f = objective_ising(d);
  for (int k = 0; k < 5; ++k) {
    const Vector theta = gaussian(rng, 10);
    EXPECT_NEAR(f.value(theta), ising_reference(d.x, theta), 1e-9);
  }
}

TEST(ModelZoo, IsingEdgeIndexIsBijective) {
  const Index q = 7;
  std::vector<int> hits(q * (q - 1) / 2, 0);
  for (Index a = 0; a < q; ++a)
    for (Index b = a + 1; b < q; ++b) ++hits[ising_edge_index(q, a, b)];
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST(ModelZoo, TrendIncrementsReproduceData) {
  ModelSpec spec = small(ModelKind::TrendFilter);
  spec.signal = 0.0;
  const Dataset d = generate(spec);
  Vector increments(d.y.size());
  increments[0] = d.y[0];
  for (Index i = 1; i < d.y.size(); ++i) increments[i] = d.y[i] - d.y[i - 1];
  EXPECT_NEAR(objective_trend(d).value(increments), 0.0, 1e-20);
  EXPECT_NEAR(objective_trend_norm(d).value(increments), 0.0, 1e-10);
  EXPECT_EQ(static_cast<Index>(d.true_support.size()), d.y.size());
}

TEST(ModelZoo, TrendJumpsAreLargeAndInterior) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelSpec spec;
    spec.kind = ModelKind::TrendFilter;
    spec.n = 200;
    spec.p = 200;
    spec.s_true = 5;
    spec.seed = seed;
    const Dataset d = generate(spec);
    ASSERT_EQ(d.true_support.size(), 5u);
    for (Index j : d.true_support) {
      EXPECT_GE(j, 1);
      EXPECT_GE(std::abs(d.theta_true[j]), 5.0);
    }
  }
}

TEST(ModelZoo, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (ModelKind kind : kKinds) {
    const Dataset d = generate(small(kind, 3));
    const auto f = make_objective(d);
    for (int k = 0; k < 20; ++k) {
      const Vector theta = 0.3 * gaussian(rng, f.dimension());
      const Vector fd = fd_gradient(f, theta, 1e-6, StepRule::Relative);
      const Vector ad = f.gradient(theta);
      EXPECT_LE((ad - fd).lpNorm<Eigen::Infinity>(), 1e-6 * (1.0 + fd.lpNorm<Eigen::Infinity>()))
          << model_name(kind);
    }
  }
}

TEST(ModelZoo, ResidualObjectivesAreNonNegative) {
  std::mt19937_64 rng(3);
  for (ModelKind kind : {ModelKind::Linear, ModelKind::TrendFilter}) {
    const Dataset d = generate(small(kind));
    const auto f = make_objective(d);
    EXPECT_EQ(f.scale(), LossScale::HalfResidualSumOfSquares);
    for (int k = 0; k < 10; ++k) EXPECT_GE(f.value(gaussian(rng, f.dimension())), 0.0);
  }
  EXPECT_EQ(make_objective(generate(small(ModelKind::Logistic))).scale(),
            LossScale::NegativeLogLikelihood);
  EXPECT_EQ(make_objective(generate(small(ModelKind::Ising))).scale(),
            LossScale::NegativeLogLikelihood);
}

TEST(ModelZoo, SpecValidation) {
  ModelSpec spec;
  spec.s_true = 11;
  EXPECT_ANY_THROW(generate(spec));
  spec = ModelSpec{};
  spec.n = 0;
  EXPECT_ANY_THROW(generate(spec));
  EXPECT_EQ(parse_model("trend"), ModelKind::TrendFilter);
  EXPECT_FALSE(parse_model("poisson").has_value());
}

TEST(ModelZoo, SubsetRows) {
  const Dataset d = generate(small(ModelKind::Linear));
  const std::vector<Index> rows{3, 0, 7};
  const Dataset s = subset_rows(d, rows);
  ASSERT_EQ(s.x.rows(), 3);
  EXPECT_EQ(s.x.row(0), d.x.row(3));
  EXPECT_EQ(s.y[2], d.y[7]);
  EXPECT_THROW(subset_rows(generate(small(ModelKind::TrendFilter)), rows), std::invalid_argument);
}

TEST(ModelZoo, CsvRoundTrip) {
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Logistic, ModelKind::Ising}) {
    const Dataset d = generate(small(kind));
    std::stringstream buffer;
    write_dataset_csv(buffer, d);
    std::string header;
    std::getline(std::stringstream(buffer.str()), header);
    EXPECT_EQ(header.rfind("x0,x1,", 0), 0u);
    EXPECT_EQ(header.find(",y") != std::string::npos, d.y.size() > 0);
    const Dataset back = read_dataset_csv(buffer, kind);
    EXPECT_EQ(back.x, d.x);
    EXPECT_EQ(back.y, d.y);
  }
}
