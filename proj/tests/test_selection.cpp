#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sco/model_zoo.hpp"
#include "sco/selection.hpp"
#include "support.hpp"

using namespace sco;
using sco::testing::gaussian;

TEST(InformationCriterion, BicExample) {
  EXPECT_NEAR(information_criterion(CriterionKind::BIC, 10.0, 2, 100, 5, LossScale::Generic),
              20.0 + 2.0 * std::log(100.0), 1e-12);
  EXPECT_NEAR(information_criterion(CriterionKind::BIC, 10.0, 2, 100, 5, LossScale::Generic),
              29.21034, 1e-5);
}

TEST(InformationCriterion, Formulas) {
  const double f = 12.5;
  const double ll = std::log(std::log(200.0));
  EXPECT_DOUBLE_EQ(information_criterion(CriterionKind::AIC, f, 3, 200, 50, LossScale::Generic),
                   2 * f + 6);
  EXPECT_NEAR(information_criterion(CriterionKind::GIC, f, 3, 200, 50, LossScale::Generic),
              2 * f + 3 * std::log(50.0) * ll, 1e-12);
  EXPECT_NEAR(information_criterion(CriterionKind::SIC, f, 3, 200, 50,
                                    LossScale::HalfResidualSumOfSquares),
              200 * std::log(2 * f / 200) + 3 * std::log(50.0) * ll, 1e-12);
}

TEST(InformationCriterion, PenaltyStrictlyIncreasing) {
  for (auto kind : {CriterionKind::AIC, CriterionKind::BIC, CriterionKind::GIC, CriterionKind::SIC}) {
    for (Index s = 0; s < 10; ++s) {
      EXPECT_LT(information_criterion(kind, 7.0, s, 100, 20, LossScale::HalfResidualSumOfSquares),
                information_criterion(kind, 7.0, s + 1, 100, 20,
                                      LossScale::HalfResidualSumOfSquares));
    }
  }
}

TEST(InformationCriterion, Errors) {
  EXPECT_THROW(information_criterion(CriterionKind::SIC, 1.0, 1, 100, 10,
                                     LossScale::NegativeLogLikelihood),
               std::invalid_argument);
  EXPECT_THROW(information_criterion(CriterionKind::GIC, 1.0, 1, 2, 10, LossScale::Generic),
               std::invalid_argument);
  EXPECT_THROW(information_criterion(CriterionKind::BIC, 1.0, 1, 1, 10, LossScale::Generic),
               std::invalid_argument);
  EXPECT_NO_THROW(information_criterion(CriterionKind::BIC, 1.0, 1, 2, 10, LossScale::Generic));
}

TEST(Grid, Validation) {
  EXPECT_THROW(validate_grid(std::vector<Index>{}, 5), std::invalid_argument);
  EXPECT_THROW(validate_grid(std::vector<Index>{0, 1}, 5), std::invalid_argument);
  EXPECT_THROW(validate_grid(std::vector<Index>{2, 2}, 5), std::invalid_argument);
  EXPECT_THROW(validate_grid(std::vector<Index>{1, 6}, 5), std::invalid_argument);
  EXPECT_NO_THROW(validate_grid(std::vector<Index>{1, 3, 5}, 5));
}

TEST(SolvePath, SingleLevelEqualsDirectSolve) {
  const auto inst = sco::testing::random_ols(2, 40, 10);
  const ScoProblem problem(sco::testing::ols_oracle(inst.x, inst.y), 3);
  const auto path = solve_path(problem, std::vector<Index>{3}, SolverKind::Scope);
  SolverConfig zero;
  zero.warm_start = Vector::Zero(10);
  const ScoSolution direct = solve(SolverKind::Scope, problem, zero);
  ASSERT_EQ(path.size(), 1u);
  EXPECT_EQ(path[0].support, direct.support);
  EXPECT_EQ(path[0].objective, direct.objective);
}

TEST(SolvePath, OrthonormalSupportsAreNested) {
  std::mt19937_64 rng(6);
  const Matrix x = sco::testing::orthonormal_columns(rng, 30, 10);
  const Vector y = gaussian(rng, 30);
  const ScoProblem problem(sco::testing::ols_oracle(x, y), 3);
  for (SolverKind kind : kAllSolvers) {
    const auto path = solve_path(problem, std::vector<Index>{1, 2, 3}, kind);
    for (std::size_t i = 1; i < path.size(); ++i) {
      EXPECT_TRUE(std::includes(path[i].support.begin(), path[i].support.end(),
                                path[i - 1].support.begin(), path[i - 1].support.end()))
          << solver_name(kind);
    }
  }
}

TEST(SolvePath, ObjectivesDecreaseAndWarmStartsNeverHurt) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelSpec spec;
    spec.n = 200;
    spec.p = 50;
    spec.s_true = 5;
    spec.seed = seed;
    const Dataset data = generate(spec);
    const ScoProblem problem = make_problem(data, 10);
    std::vector<Index> grid(10);
    std::iota(grid.begin(), grid.end(), Index{1});
    const auto path = solve_path(problem, grid, SolverKind::Scope);
    for (std::size_t i = 1; i < path.size(); ++i) {
      EXPECT_LT(path[i].objective, path[i - 1].objective);
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
      const ScoSolution cold = solve(SolverKind::Scope, problem.with_sparsity(grid[i]));
      EXPECT_LE(path[i].objective, cold.objective + 1e-8) << "seed " << seed << " s " << grid[i];
    }
  }
}

TEST(SolvePath, ErrorCarriesPartialResults) {
  // An objective that fails outright once two coordinates are nonzero.
  const auto nnz = [](const Vector& t) { return (t.array() != 0.0).count(); };
  const auto oracle = ObjectiveOracle::from_functions(
      6,
      [nnz](const Vector& t) {
        if (nnz(t) >= 2) throw std::runtime_error("backend failure");
        return (t.array() - 1.0).square().sum();
      },
      [nnz](const Vector& t) -> Vector {
        if (nnz(t) >= 2) throw std::runtime_error("backend failure");
        return 2.0 * (t.array() - 1.0).matrix();
      });
  const ScoProblem problem(oracle, 6);
  try {
    solve_path(problem, std::vector<Index>{1, 2, 3}, SolverKind::OMP);
    FAIL() << "expected a path error";
  } catch (const PathError& e) {
    EXPECT_EQ(e.partial().size(), 1u);
  }
}

TEST(Selection, ChosenIsArgminWithTiesToSmallest) {
  std::vector<PathEntry> entries(4);
  const double scores[] = {3.0, 1.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i) {
    entries[i].s = i + 1;
    entries[i].score = scores[i];
  }
  EXPECT_EQ(argmin_entry(entries), 1u);

  ModelSpec spec;
  spec.n = 100;
  spec.p = 20;
  spec.s_true = 3;
  const Dataset data = generate(spec);
  const std::vector<Index> grid{1, 2, 3, 4, 5, 6};
  for (auto kind : {CriterionKind::AIC, CriterionKind::BIC, CriterionKind::GIC, CriterionKind::SIC}) {
    const PathResult r = select_by_criterion(make_problem(data, 6), grid, kind, SolverKind::Scope);
    ASSERT_EQ(r.entries.size(), grid.size());
    for (const auto& e : r.entries) {
      EXPECT_DOUBLE_EQ(e.score, information_criterion(kind, e.solution.objective, e.s, 100, 20,
                                                      LossScale::HalfResidualSumOfSquares));
      EXPECT_GE(e.score, r.entries[argmin_entry(r.entries)].score);
    }
    const auto best = std::min_element(r.entries.begin(), r.entries.end(),
                                       [](const auto& a, const auto& b) { return a.score < b.score; });
    EXPECT_EQ(r.chosen_s, best->s);
    EXPECT_EQ(r.chosen.support, best->solution.support);
  }
}

TEST(Selection, SicRejectsLikelihoodObjectives) {
  ModelSpec spec;
  spec.kind = ModelKind::Logistic;
  spec.n = 60;
  spec.p = 10;
  const Dataset data = generate(spec);
  EXPECT_THROW(select_by_criterion(make_problem(data, 3), std::vector<Index>{1, 2, 3},
                                   CriterionKind::SIC, SolverKind::OMP),
               std::invalid_argument);
}

TEST(Selection, NeedsSampleSize) {
  const auto inst = sco::testing::random_ols(0);
  const ScoProblem problem(sco::testing::ols_oracle(inst.x, inst.y), 3);
  EXPECT_THROW(select_by_criterion(problem, std::vector<Index>{1, 2}, CriterionKind::BIC,
                                   SolverKind::OMP),
               std::invalid_argument);
}

TEST(Folds, SizesAndDeterminism) {
  const auto folds = fold_assignment(100, 5, 42);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<int> seen(100, 0);
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 20u);
    for (Index i : f) ++seen[i];
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  EXPECT_EQ(folds, fold_assignment(100, 5, 42));
  EXPECT_NE(folds, fold_assignment(100, 5, 43));

  const auto loo = fold_assignment(10, 10, 0);
  for (const auto& f : loo) EXPECT_EQ(f.size(), 1u);
  EXPECT_THROW(fold_assignment(10, 1, 0), std::invalid_argument);
  EXPECT_THROW(fold_assignment(4, 5, 0), std::invalid_argument);
}

TEST(CrossValidation, LossesMatchManualComputation) {
  ModelSpec spec;
  spec.n = 60;
  spec.p = 12;
  spec.s_true = 2;
  spec.seed = 4;
  const Dataset data = generate(spec);
  const ProblemFactory factory = [&data](std::span<const Index> rows, Index s) {
    return make_problem(subset_rows(data, rows), s);
  };
  const std::vector<Index> grid{1, 2, 3};
  SolverConfig config;
  config.seed = 9;
  const PathResult r = cross_validate(factory, 60, 3, grid, SolverKind::OMP, config);

  // Independent recomputation: OLS refit per fold on the OMP support, held-out RSS / 2.
  const auto folds = fold_assignment(60, 3, 9);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double total = 0.0;
    for (const auto& hold : folds) {
      std::vector<Index> train;
      for (Index i = 0; i < 60; ++i)
        if (std::find(hold.begin(), hold.end(), i) == hold.end()) train.push_back(i);
      const Dataset tr = subset_rows(data, train);
      const Dataset te = subset_rows(data, hold);
      const auto path = solve_path(make_problem(tr, 3), grid, SolverKind::OMP, config);
      const Vector th = sco::testing::least_squares_on(tr.x, tr.y, path[g].support);
      total += 0.5 * (te.y - te.x * th).squaredNorm();
    }
    EXPECT_NEAR(r.entries[g].score, total / 3.0, 1e-6 * (1.0 + total));
  }
  EXPECT_EQ(r.chosen_s, r.entries[argmin_entry(r.entries)].s);
}

TEST(CrossValidation, RejectsBadFoldCounts) {
  const Dataset data = generate(ModelSpec{});
  const ProblemFactory factory = [&data](std::span<const Index> rows, Index s) {
    return make_problem(subset_rows(data, rows), s);
  };
  EXPECT_THROW(cross_validate(factory, 100, 1, std::vector<Index>{1}, SolverKind::OMP),
               std::invalid_argument);
  EXPECT_THROW(cross_validate(factory, 100, 101, std::vector<Index>{1}, SolverKind::OMP),
               std::invalid_argument);
}

TEST(CriterionNames, RoundTrip) {
  for (auto kind : {CriterionKind::AIC, CriterionKind::BIC, CriterionKind::GIC, CriterionKind::SIC,
                    CriterionKind::CrossValidation}) {
    EXPECT_EQ(parse_criterion(criterion_name(kind)), kind);
  }
  EXPECT_FALSE(parse_criterion("hqic").has_value());
}
