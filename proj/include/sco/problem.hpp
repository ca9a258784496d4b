#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sco/ad.hpp"

namespace sco {

/// Partition of the selectable coordinates into units. Ungrouped problems
/// use one singleton unit per non-preselected coordinate.
class GroupView {
 public:
  GroupView() = default;

  static GroupView singletons(Index dimension, std::span<const Index> preselect = {});

  /// group_ids[j] is the unit of coordinate j, or -1 for a preselected
  /// coordinate. Every id in 0..G-1 must occur.
  static GroupView from_groups(std::span<const Index> group_ids,
                               std::span<const Index> preselect = {});

  Index unit_count() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index dimension() const { return static_cast<Index>(unit_of_.size()); }

  std::span<const Index> coordinates(Index unit) const {
    return {coords_.data() + offsets_[unit], coords_.data() + offsets_[unit + 1]};
  }

  /// -1 for preselected coordinates.
  Index unit_of(Index coordinate) const { return unit_of_[coordinate]; }

  double squared_score(const Vector& v, Index unit) const;
  double score(const Vector& v, Index unit) const;

 private:
  std::vector<Index> offsets_{0};
  std::vector<Index> coords_;
  std::vector<Index> unit_of_;
};

struct ProblemOptions {
  /// Empty for an ungrouped problem; otherwise one entry per coordinate.
  std::vector<Index> groups;
  /// Coordinates that are always active and do not count against the budget.
  std::vector<Index> preselect;
  /// Number of observations behind the objective; information criteria need it.
  std::optional<Index> sample_size;
};

/// argmin f(theta) subject to at most `sparsity` selected units being nonzero.
class ScoProblem {
 public:
  ScoProblem(ObjectiveOracle oracle, Index sparsity, ProblemOptions options = {});

  Index dimension() const { return oracle_.dimension(); }
  Index sparsity() const { return sparsity_; }
  const ObjectiveOracle& oracle() const { return oracle_; }
  const GroupView& view() const { return view_; }
  const std::vector<Index>& preselect() const { return options_.preselect; }
  const std::vector<Index>& groups() const { return options_.groups; }
  std::optional<Index> sample_size() const { return options_.sample_size; }

  ScoProblem with_sparsity(Index sparsity) const;

  /// Sorted coordinates of the given units (preselect not included).
  std::vector<Index> unit_coordinates(std::span<const Index> units) const;
  /// Sorted coordinates of the given units together with the preselected ones.
  std::vector<Index> free_coordinates(std::span<const Index> units) const;

 private:
  ObjectiveOracle oracle_;
  Index sparsity_;
  ProblemOptions options_;
  GroupView view_;
};

struct SolverConfig {
  Index max_iter = 100;
  /// Objective-improvement stopping threshold.
  double tol = 1e-8;
  /// Initial gradient step; backtracking always starts from this value.
  std::optional<double> step_size;
  Index inner_max_iter = 100;
  /// Gradient infinity-norm threshold of the restricted minimizer.
  double inner_tol = 1e-8;
  std::optional<std::uint64_t> seed;
  std::optional<Vector> warm_start;
  /// FoBa accepts a deletion while its cost is at most this fraction of the
  /// last forward gain.
  double foba_backward_factor = 0.5;

  /// Throws std::invalid_argument on a nonsensical setting.
  void validate() const;
};

struct IterRecord {
  Index iteration = 0;
  double objective = 0.0;
  Index support_changes = 0;
};

struct ScoSolution {
  Vector params;
  /// Sorted coordinates of the selected units (preselected coordinates excluded).
  std::vector<Index> support;
  /// Sorted ids of the selected units.
  std::vector<Index> units;
  double objective = 0.0;
  Index iterations = 0;
  bool converged = false;
  double runtime_seconds = 0.0;
  std::vector<IterRecord> trace;
};

/// Units with the s largest scores (Euclidean norm over the unit); ties go to
/// the lower unit id. Result is sorted ascending.
std::vector<Index> hard_threshold(const Vector& v, Index s, const GroupView& view);

/// Zeroes every coordinate outside hard_threshold(v, s) and the preselected set.
Vector project_feasible(const Vector& v, const ScoProblem& problem);

struct RestrictedResult {
  Vector params;
  double objective = 0.0;
  Index iterations = 0;
  bool converged = false;
};

/// Minimizes f over `support` and the preselected coordinates with every
/// other coordinate pinned at zero. Limited-memory BFGS (memory 10) with an
/// Armijo backtracking line search; never returns a point worse than init.
RestrictedResult restricted_minimize(const ScoProblem& problem, std::span<const Index> support,
                                     const Vector& init, const SolverConfig& config = {});

/// Same, reusing a caller-owned evaluator.
RestrictedResult restricted_minimize(const ScoProblem& problem,
                                     ObjectiveOracle::Evaluator& evaluator,
                                     std::span<const Index> support, const Vector& init,
                                     const SolverConfig& config = {});

/// Returns a description of every violated solution invariant; empty if valid.
std::vector<std::string> validate_solution(const ScoProblem& problem, const ScoSolution& solution,
                                           double objective_tol = 1e-12);

}  // namespace sco
