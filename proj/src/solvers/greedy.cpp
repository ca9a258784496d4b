// Forward selection, orthogonal matching pursuit and FoBa.

#include <limits>

#include "sco/solvers.hpp"
#include "search_state.hpp"

namespace sco {

namespace {

struct Candidate {
  Index unit = -1;
  std::vector<Index> units;
  RestrictedResult fit;
};

// Tries every inactive unit and keeps the one whose refit reaches the lowest
// objective (ties to the lower unit id).
Candidate best_addition(detail::SearchState& state) {
  Candidate best;
  best.fit.objective = std::numeric_limits<double>::infinity();
  const Index selectable = state.unit_count();
  for (Index u = 0; u < selectable; ++u) {
    if (state.is_active(u)) continue;
    const Index add[] = {u};
    auto units = detail::sorted_union(state.units, add);
    RestrictedResult fit = state.refit(units, state.theta);
    if (best.unit < 0 || fit.objective < best.fit.objective) {
      best.unit = u;
      best.units = std::move(units);
      best.fit = std::move(fit);
    }
  }
  return best;
}

}  // namespace

ScoSolution solve_forward(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  while (static_cast<Index>(state.units.size()) < problem.sparsity() &&
         state.iterations < config.max_iter) {
    Candidate best = best_addition(state);
    state.accept(std::move(best.units), std::move(best.fit));
    ++state.iterations;
    state.record(1);
  }
  state.converged = static_cast<Index>(state.units.size()) == problem.sparsity();
  return state.finish();
}

ScoSolution solve_omp(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  const GroupView& view = problem.view();
  while (static_cast<Index>(state.units.size()) < problem.sparsity() &&
         state.iterations < config.max_iter) {
    const Vector& g = state.gradient();
    Index chosen = -1;
    double chosen_score = -1.0;
    for (Index u = 0; u < view.unit_count(); ++u) {
      if (state.is_active(u)) continue;
      const double score = view.squared_score(g, u);
      if (score > chosen_score) {
        chosen = u;
        chosen_score = score;
      }
    }
    const Index add[] = {chosen};
    auto units = detail::sorted_union(state.units, add);
    RestrictedResult fit = state.refit(units, state.theta);
    state.accept(std::move(units), std::move(fit));
    ++state.iterations;
    state.record(1);
  }
  state.converged = static_cast<Index>(state.units.size()) == problem.sparsity();
  return state.finish();
}

ScoSolution solve_foba(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  const double nu = config.foba_backward_factor;

  while (state.iterations < config.max_iter) {
    if (static_cast<Index>(state.units.size()) >= problem.sparsity()) {
      state.converged = true;
      break;
    }
    const double before = state.objective;
    Candidate forward = best_addition(state);
    const double gain = before - forward.fit.objective;
    state.accept(std::move(forward.units), std::move(forward.fit));
    ++state.iterations;

    // Deletions within one round may cost at most nu times the forward gain
    // in total, so every round ends strictly below where it started.
    Index deletions = 0;
    double round_cost = 0.0;
    while (gain > config.tol && state.units.size() > 1) {
      Candidate cheapest;
      for (Index u : state.units) {
        std::vector<Index> remaining;
        remaining.reserve(state.units.size() - 1);
        for (Index v : state.units) {
          if (v != u) remaining.push_back(v);
        }
        const Index drop[] = {u};
        RestrictedResult fit = state.refit(remaining, state.without_units(drop));
        if (cheapest.unit < 0 || fit.objective < cheapest.fit.objective) {
          cheapest.unit = u;
          cheapest.units = std::move(remaining);
          cheapest.fit = std::move(fit);
        }
      }
      const double cost = cheapest.fit.objective - state.objective;
      if (round_cost + cost > nu * gain) break;
      round_cost += cost;
      state.accept(std::move(cheapest.units), std::move(cheapest.fit));
      ++deletions;
    }
    state.record(1 + deletions);
  }
  return state.finish();
}

}  // namespace sco
