#include "sco/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace sco {

std::string_view criterion_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::AIC: return "aic";
    case CriterionKind::BIC: return "bic";
    case CriterionKind::GIC: return "gic";
    case CriterionKind::SIC: return "sic";
    case CriterionKind::CrossValidation: return "cv";
  }
  return "unknown";
}

std::optional<CriterionKind> parse_criterion(std::string_view name) {
  for (CriterionKind kind : {CriterionKind::AIC, CriterionKind::BIC, CriterionKind::GIC,
                             CriterionKind::SIC, CriterionKind::CrossValidation}) {
    if (criterion_name(kind) == name) return kind;
  }
  return std::nullopt;
}

void validate_grid(std::span<const Index> grid, Index selectable_units) {
  if (grid.empty()) throw std::invalid_argument("sparsity grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || grid[i] > selectable_units) {
      throw std::invalid_argument("grid value " + std::to_string(grid[i]) + " outside 1.." +
                                  std::to_string(selectable_units));
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("sparsity grid must be strictly increasing");
    }
  }
}

double information_criterion(CriterionKind kind, double objective, Index s, Index n, Index p,
                             LossScale scale) {
  if (n < 2 || p < 1) throw std::invalid_argument("information criteria need n >= 2 and p >= 1");
  if (s < 0) throw std::invalid_argument("negative sparsity");
  const double nd = static_cast<double>(n);
  const double sd = static_cast<double>(s);
  const auto log_log_n = [&] {
    if (nd <= std::exp(1.0)) throw std::invalid_argument("log(log n) undefined for n <= e");
    return std::log(std::log(nd));
  };
  switch (kind) {
    case CriterionKind::AIC: return 2.0 * objective + 2.0 * sd;
    case CriterionKind::BIC: return 2.0 * objective + sd * std::log(nd);
    case CriterionKind::GIC:
      return 2.0 * objective + sd * std::log(static_cast<double>(p)) * log_log_n();
    case CriterionKind::SIC: {
      if (scale != LossScale::HalfResidualSumOfSquares) {
        throw std::invalid_argument("SIC requires a residual-sum-of-squares objective");
      }
      const double penalty = sd * std::log(static_cast<double>(p)) * log_log_n();
      if (!(objective > 0.0)) return -std::numeric_limits<double>::infinity();
      return nd * std::log(2.0 * objective / nd) + penalty;
    }
    case CriterionKind::CrossValidation:
      throw std::invalid_argument("cross-validation is not an information criterion");
  }
  throw std::invalid_argument("unknown criterion");
}

std::vector<ScoSolution> solve_path(const ScoProblem& problem, std::span<const Index> grid,
                                    SolverKind kind, const SolverConfig& config) {
  validate_grid(grid, problem.view().unit_count());
  std::vector<ScoSolution> path;
  path.reserve(grid.size());
  for (Index s : grid) {
    try {
      const ScoProblem level = problem.with_sparsity(s);
      ScoSolution best = solve(kind, level, config);
      if (!path.empty()) {
        // The warm start seeds a second solve; the better of the two is kept
        // so the path is never worse than independent solves.
        SolverConfig warm = config;
        warm.warm_start = path.back().params;
        ScoSolution seeded = solve(kind, level, warm);
        if (seeded.objective <= best.objective) best = std::move(seeded);
      }
      path.push_back(std::move(best));
    } catch (const std::exception& e) {
      throw PathError("path solve failed at s=" + std::to_string(s) + ": " + e.what(),
                      std::move(path));
    }
  }
  return path;
}

std::size_t argmin_entry(const std::vector<PathEntry>& entries) {
  if (entries.empty()) throw std::invalid_argument("no path entries");
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].score < entries[best].score) best = i;
  }
  return best;
}

PathResult select_by_criterion(const ScoProblem& problem, std::span<const Index> grid,
                               CriterionKind criterion, SolverKind kind,
                               const SolverConfig& config) {
  if (criterion == CriterionKind::CrossValidation) {
    throw std::invalid_argument("use cross_validate for cross-validation");
  }
  if (!problem.sample_size()) {
    throw std::invalid_argument("information criteria need the problem's sample size");
  }
  auto path = solve_path(problem, grid, kind, config);
  PathResult result;
  result.criterion = criterion;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double score =
        information_criterion(criterion, path[i].objective, grid[i], *problem.sample_size(),
                              problem.dimension(), problem.oracle().scale());
    result.entries.push_back({grid[i], score, std::move(path[i])});
  }
  const std::size_t best = argmin_entry(result.entries);
  result.chosen_s = result.entries[best].s;
  result.chosen = result.entries[best].solution;
  return result;
}

std::vector<std::vector<Index>> fold_assignment(Index rows, Index folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (rows < folds) throw std::invalid_argument("more folds than rows leaves a fold empty");
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Index>> assignment(static_cast<std::size_t>(folds));
  for (Index i = 0; i < rows; ++i) assignment[i % folds].push_back(order[i]);
  for (auto& fold : assignment) std::sort(fold.begin(), fold.end());
  return assignment;
}

PathResult cross_validate(const ProblemFactory& factory, Index rows, Index folds,
                          std::span<const Index> grid, SolverKind kind,
                          const SolverConfig& config) {
  const auto assignment = fold_assignment(rows, folds, config.seed.value_or(0));
  if (grid.empty()) throw std::invalid_argument("sparsity grid is empty");

  std::vector<double> loss(grid.size(), 0.0);
  for (const auto& holdout : assignment) {
    std::vector<char> held_out(static_cast<std::size_t>(rows), 0);
    for (Index i : holdout) held_out[i] = 1;
    std::vector<Index> train;
    for (Index i = 0; i < rows; ++i) {
      if (!held_out[i]) train.push_back(i);
    }
    const ScoProblem fit_problem = factory(train, grid.back());
    const auto path = solve_path(fit_problem, grid, kind, config);
    const ScoProblem held = factory(holdout, grid.front());
    auto evaluator = held.oracle().evaluator();
    for (std::size_t i = 0; i < grid.size(); ++i) loss[i] += evaluator.value(path[i].params);
  }

  std::vector<Index> all(static_cast<std::size_t>(rows));
  std::iota(all.begin(), all.end(), Index{0});
  auto full_path = solve_path(factory(all, grid.back()), grid, kind, config);

  PathResult result;
  result.criterion = CriterionKind::CrossValidation;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.entries.push_back(
        {grid[i], loss[i] / static_cast<double>(folds), std::move(full_path[i])});
  }
  const std::size_t best = argmin_entry(result.entries);
  result.chosen_s = result.entries[best].s;
  result.chosen = result.entries[best].solution;
  return result;
}

}  // namespace sco
