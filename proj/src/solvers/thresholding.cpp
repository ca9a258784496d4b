// Iterative hard thresholding, hard thresholding pursuit and GraSP.

#include <numeric>
#include <unordered_set>

#include "sco/solvers.hpp"
#include "search_state.hpp"

namespace sco {

namespace {

constexpr double kSufficientDecrease = 1e-4;
constexpr int kMaxHalvings = 50;

struct ThresholdedStep {
  bool accepted = false;
  std::vector<Index> units;
  RestrictedResult point;
};

// theta+ = project_feasible(theta - eta * g), with eta halved from the initial
// step until f(theta+) <= f(theta) - c * eta * |g on supp(theta+)|^2.
ThresholdedStep thresholded_step(detail::SearchState& state, const Vector& g) {
  const ScoProblem& problem = state.problem;
  ThresholdedStep step;
  double eta = state.config.step_size.value_or(1.0);
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, eta *= 0.5) {
    const Vector moved = state.theta - eta * g;
    std::vector<Index> units = hard_threshold(moved, problem.sparsity(), problem.view());
    Vector projected = Vector::Zero(problem.dimension());
    double g_norm2 = 0.0;
    for (Index j : problem.free_coordinates(units)) {
      projected[j] = moved[j];
      g_norm2 += g[j] * g[j];
    }
    double value = 0.0;
    try {
      value = state.evaluator.value(projected);
    } catch (const EvaluationError&) {
      continue;
    }
    if (value <= state.objective - kSufficientDecrease * eta * g_norm2) {
      step.accepted = true;
      step.units = std::move(units);
      step.point.params = std::move(projected);
      step.point.objective = value;
      return step;
    }
  }
  return step;
}

struct UnitsHash {
  std::size_t operator()(const std::vector<Index>& units) const noexcept {
    std::size_t h = units.size();
    for (Index u : units) h ^= std::hash<Index>{}(u) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace

ScoSolution solve_iht(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  while (state.iterations < config.max_iter) {
    const Vector g = state.gradient();
    ThresholdedStep step = thresholded_step(state, g);
    if (!step.accepted) {
      state.converged = true;
      break;
    }
    ++state.iterations;
    const double decrease = state.objective - step.point.objective;
    const Index changes = detail::support_changes(state.units, step.units);
    state.accept(std::move(step.units), std::move(step.point));
    state.record(changes);
    if (decrease <= config.tol) {
      state.converged = true;
      break;
    }
  }
  return state.finish();
}

ScoSolution solve_htp(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  std::unordered_set<std::vector<Index>, UnitsHash> visited{state.units};
  while (state.iterations < config.max_iter) {
    const Vector g = state.gradient();
    ThresholdedStep step = thresholded_step(state, g);
    if (!step.accepted || step.units == state.units) {
      state.converged = true;
      break;
    }
    ++state.iterations;
    const Index changes = detail::support_changes(state.units, step.units);
    RestrictedResult fit = state.refit(step.units, step.point.params);
    const bool seen = !visited.insert(step.units).second;
    state.accept(std::move(step.units), std::move(fit));
    state.record(changes);
    if (seen) break;
  }
  return state.finish();
}

ScoSolution solve_grasp(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  state.remember_best();
  const GroupView& view = problem.view();
  const Index s = problem.sparsity();
  while (state.iterations < config.max_iter) {
    std::vector<Index> candidates;
    if (3 * s >= view.unit_count()) {
      candidates.resize(static_cast<std::size_t>(view.unit_count()));
      std::iota(candidates.begin(), candidates.end(), Index{0});
    } else {
      candidates = detail::sorted_union(hard_threshold(state.gradient(), 2 * s, view), state.units);
    }
    RestrictedResult wide = state.refit(candidates, state.theta);
    std::vector<Index> pruned = hard_threshold(wide.params, s, view);
    Vector init = Vector::Zero(problem.dimension());
    for (Index j : problem.free_coordinates(pruned)) init[j] = wide.params[j];
    RestrictedResult fit = state.refit(pruned, init);

    ++state.iterations;
    const Index changes = detail::support_changes(state.units, pruned);
    state.accept(std::move(pruned), std::move(fit));
    state.record(changes);
    state.remember_best();
    if (changes == 0) {
      state.converged = true;
      break;
    }
  }
  state.restore_best();
  return state.finish();
}

}  // namespace sco
