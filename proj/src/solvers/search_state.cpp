#include "search_state.hpp"

#include <stdexcept>

namespace sco::detail {

SearchState::SearchState(const ScoProblem& problem, const SolverConfig& config)
    : problem(problem),
      config(config),
      evaluator(problem.oracle().evaluator()),
      theta(Vector::Zero(problem.dimension())),
      active_(static_cast<std::size_t>(problem.view().unit_count()), 0) {
  config.validate();
}

void SearchState::start() {
  Vector init = Vector::Zero(problem.dimension());
  std::vector<Index> initial;
  if (config.warm_start) {
    const Vector& warm = *config.warm_start;
    if (warm.size() != problem.dimension()) {
      throw std::invalid_argument("warm_start has size " + std::to_string(warm.size()) +
                                  ", expected " + std::to_string(problem.dimension()));
    }
    const GroupView& view = problem.view();
    initial = rank_units(
        view.unit_count(), [&](Index u) { return view.squared_score(warm, u); },
        [&](Index u) { return view.squared_score(warm, u) > 0.0; });
    if (static_cast<Index>(initial.size()) > problem.sparsity()) {
      initial.resize(static_cast<std::size_t>(problem.sparsity()));
    }
    std::sort(initial.begin(), initial.end());
    init = warm;
  }
  accept(initial, refit(initial, init));
}

RestrictedResult SearchState::refit(std::span<const Index> unit_list, const Vector& init) {
  const auto coords = problem.unit_coordinates(unit_list);
  return restricted_minimize(problem, evaluator, coords, init, config);
}

void SearchState::accept(std::vector<Index> new_units, RestrictedResult result) {
  for (Index u : units) active_[u] = 0;
  units = std::move(new_units);
  for (Index u : units) active_[u] = 1;
  theta = std::move(result.params);
  objective = result.objective;
  gradient_valid_ = false;
}

const Vector& SearchState::gradient() {
  if (!gradient_valid_) {
    evaluator.value_and_gradient(theta, gradient_);
    gradient_valid_ = true;
  }
  return gradient_;
}

void SearchState::record(Index changes) {
  trace.push_back({iterations, objective, changes});
}

void SearchState::remember_best() {
  if (!has_best_ || objective < best_objective_) {
    has_best_ = true;
    best_theta_ = theta;
    best_objective_ = objective;
    best_units_ = units;
  }
}

void SearchState::restore_best() {
  if (!has_best_ || best_objective_ >= objective) return;
  RestrictedResult best;
  best.params = best_theta_;
  best.objective = best_objective_;
  accept(best_units_, std::move(best));
}

Vector SearchState::without_units(std::span<const Index> unit_list) const {
  Vector out = theta;
  for (Index u : unit_list) {
    for (Index j : problem.view().coordinates(u)) out[j] = 0.0;
  }
  return out;
}

ScoSolution SearchState::finish() {
  RestrictedResult final_fit = refit(units, theta);
  if (final_fit.objective <= objective) accept(units, std::move(final_fit));

  ScoSolution solution;
  solution.params = theta;
  solution.units = units;
  solution.support = problem.unit_coordinates(units);
  solution.objective = objective;
  solution.iterations = iterations;
  solution.converged = converged;
  solution.trace = std::move(trace);
  return solution;
}

Index support_changes(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return static_cast<Index>(diff.size());
}

std::vector<Index> sorted_union(std::vector<Index> a, std::span<const Index> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace sco::detail
