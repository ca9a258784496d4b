#pragma once

// Iterate bookkeeping shared by the solver implementations.

#include <algorithm>
#include <limits>
#include <utility>
#include <span>
#include <vector>

#include "sco/problem.hpp"

namespace sco::detail {

class SearchState {
 public:
  SearchState(const ScoProblem& problem, const SolverConfig& config);

  /// Initial units from the warm start (its nonzero units, at most s) and the
  /// restricted minimizer on them. Without a warm start: no units, theta = 0.
  void start();

  /// Restricted minimization on the coordinates of `units` (plus preselect).
  RestrictedResult refit(std::span<const Index> units, const Vector& init);

  void accept(std::vector<Index> units, RestrictedResult result);

  /// Full gradient at the current iterate.
  const Vector& gradient();

  void record(Index support_changes);

  /// Keeps a copy of the current iterate if it beats the best so far.
  void remember_best();
  void restore_best();

  /// Final refit on the current support, packaged as a solution.
  ScoSolution finish();

  bool is_active(Index unit) const { return active_[unit] != 0; }
  Index unit_count() const { return problem.view().unit_count(); }
  Index sparsity() const { return problem.sparsity(); }

  /// theta with the coordinates of `units` zeroed.
  Vector without_units(std::span<const Index> units) const;

  const ScoProblem& problem;
  const SolverConfig& config;
  ObjectiveOracle::Evaluator evaluator;

  Vector theta;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<Index> units;
  Index iterations = 0;
  bool converged = false;
  std::vector<IterRecord> trace;

 private:
  std::vector<char> active_;
  Vector gradient_;
  bool gradient_valid_ = false;

  bool has_best_ = false;
  Vector best_theta_;
  double best_objective_ = std::numeric_limits<double>::infinity();
  std::vector<Index> best_units_;
};

/// |a \ b| + |b \ a| for sorted unit lists.
Index support_changes(const std::vector<Index>& a, const std::vector<Index>& b);

/// Units sorted by descending score, ties to the lower id, restricted to
/// units where `eligible(u)` holds.
template <typename Score, typename Eligible>
std::vector<Index> rank_units(Index units, Score&& score, Eligible&& eligible) {
  std::vector<std::pair<double, Index>> scored;
  for (Index u = 0; u < units; ++u) {
    if (eligible(u)) scored.emplace_back(score(u), u);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  std::vector<Index> order;
  order.reserve(scored.size());
  for (const auto& entry : scored) order.push_back(entry.second);
  return order;
}

std::vector<Index> sorted_union(std::vector<Index> a, std::span<const Index> b);

}  // namespace sco::detail
