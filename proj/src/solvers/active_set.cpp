// Primal-dual active set and splicing (SCOPE).

#include <set>

#include "sco/solvers.hpp"
#include "search_state.hpp"

namespace sco {

namespace {

constexpr double kSufficientDecrease = 1e-4;
constexpr int kMaxHalvings = 50;

// Adds the inactive units with the largest gradient norm until s are active.
void fill_active_set(detail::SearchState& state) {
  const Index missing = state.sparsity() - static_cast<Index>(state.units.size());
  if (missing <= 0) return;
  const GroupView& view = state.problem.view();
  const Vector& g = state.gradient();
  auto ranked = detail::rank_units(
      view.unit_count(), [&](Index u) { return view.squared_score(g, u); },
      [&](Index u) { return !state.is_active(u); });
  ranked.resize(static_cast<std::size_t>(missing));
  auto units = detail::sorted_union(state.units, ranked);
  RestrictedResult fit = state.refit(units, state.theta);
  state.accept(std::move(units), std::move(fit));
}

}  // namespace

ScoSolution solve_pdas(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  fill_active_set(state);
  state.remember_best();

  const GroupView& view = problem.view();
  const Index s = problem.sparsity();
  std::set<std::vector<Index>> visited{state.units};
  double eta = 1.0;

  while (state.iterations < config.max_iter) {
    const Vector g = state.gradient();

    // Step length along -g over the strongest inactive candidates; it puts the
    // dual scores on the scale of the coefficients.
    auto candidates = detail::rank_units(
        view.unit_count(), [&](Index u) { return view.squared_score(g, u); },
        [&](Index u) { return !state.is_active(u); });
    if (static_cast<Index>(candidates.size()) > s) candidates.resize(static_cast<std::size_t>(s));
    const auto probe_coords = problem.unit_coordinates(candidates);
    double g_norm2 = 0.0;
    for (Index j : probe_coords) g_norm2 += g[j] * g[j];
    if (g_norm2 > 0.0) {
      double trial = config.step_size.value_or(1.0);
      for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, trial *= 0.5) {
        Vector probe = state.theta;
        for (Index j : probe_coords) probe[j] -= trial * g[j];
        double value = 0.0;
        try {
          value = state.evaluator.value(probe);
        } catch (const EvaluationError&) {
          continue;
        }
        if (value <= state.objective - kSufficientDecrease * trial * g_norm2) {
          eta = trial;
          break;
        }
      }
    }

    auto next = detail::rank_units(
        view.unit_count(),
        [&](Index u) {
          return state.is_active(u) ? view.squared_score(state.theta, u)
                                    : eta * eta * view.squared_score(g, u);
        },
        [](Index) { return true; });
    next.resize(static_cast<std::size_t>(s));
    std::sort(next.begin(), next.end());

    ++state.iterations;
    if (next == state.units) {
      state.record(0);
      state.converged = true;
      break;
    }
    const Index changes = detail::support_changes(state.units, next);
    if (!visited.insert(next).second) {
      state.record(0);
      break;
    }
    RestrictedResult fit = state.refit(next, Vector(state.theta));
    state.accept(std::move(next), std::move(fit));
    state.record(changes);
    state.remember_best();
  }
  state.restore_best();
  return state.finish();
}

ScoSolution solve_scope(const ScoProblem& problem, const SolverConfig& config) {
  detail::SearchState state(problem, config);
  state.start();
  fill_active_set(state);

  const GroupView& view = problem.view();
  const Index s = problem.sparsity();

  while (state.iterations < config.max_iter) {
    const Vector& g = state.gradient();
    // Backward sacrifice |theta_u|^2 (smallest first), forward sacrifice
    // |g_u|^2 (largest first).
    auto backward = detail::rank_units(
        view.unit_count(), [&](Index u) { return -view.squared_score(state.theta, u); },
        [&](Index u) { return state.is_active(u); });
    auto forward = detail::rank_units(
        view.unit_count(), [&](Index u) { return view.squared_score(g, u); },
        [&](Index u) { return !state.is_active(u); });

    const Index k_max = std::min<Index>({s, static_cast<Index>(backward.size()),
                                         static_cast<Index>(forward.size())});
    bool spliced = false;
    for (Index k = k_max; k >= 1; --k) {
      std::vector<Index> removed(backward.begin(), backward.begin() + k);
      std::sort(removed.begin(), removed.end());
      std::vector<Index> kept;
      std::set_difference(state.units.begin(), state.units.end(), removed.begin(), removed.end(),
                          std::back_inserter(kept));
      auto units = detail::sorted_union(
          std::move(kept), std::span<const Index>(forward.data(), static_cast<std::size_t>(k)));
      RestrictedResult fit = state.refit(units, state.without_units(removed));
      if (fit.objective < state.objective - config.tol) {
        state.accept(std::move(units), std::move(fit));
        state.record(2 * k);
        spliced = true;
        break;
      }
    }
    ++state.iterations;
    if (!spliced) {
      state.record(0);
      state.converged = true;
      break;
    }
  }
  return state.finish();
}

}  // namespace sco
