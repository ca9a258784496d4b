#pragma once

// Sparsity-level selection by information criteria or K-fold cross-validation.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sco/solvers.hpp"

namespace sco {

enum class CriterionKind { AIC, BIC, GIC, SIC, CrossValidation };

std::string_view criterion_name(CriterionKind kind);
std::optional<CriterionKind> parse_criterion(std::string_view name);

/// Candidate sparsity levels: 1..count of selectable units, strictly increasing.
void validate_grid(std::span<const Index> grid, Index selectable_units);

/// AIC = 2f + 2s, BIC = 2f + s log n, GIC = 2f + s log p log log n,
/// SIC = n log(2f / n) + s log p log log n.
///
/// f is read on the negative log-likelihood scale for AIC/BIC/GIC. SIC needs
/// f = RSS / 2 and rejects any other loss scale. GIC and SIC need n > e.
double information_criterion(CriterionKind kind, double objective, Index s, Index n, Index p,
                             LossScale scale);

/// A path solve that failed part-way; carries the levels solved before the error.
class PathError : public std::runtime_error {
 public:
  PathError(const std::string& what, std::vector<ScoSolution> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<ScoSolution>& partial() const { return partial_; }

 private:
  std::vector<ScoSolution> partial_;
};

/// Solves at every grid level in increasing order. Each level after the first
/// is also solved warm-started from the previous level's solution and keeps
/// whichever of the two runs reached the lower objective.
std::vector<ScoSolution> solve_path(const ScoProblem& problem, std::span<const Index> grid,
                                    SolverKind kind, const SolverConfig& config = {});

struct PathEntry {
  Index s = 0;
  /// Criterion value, or mean validation loss for cross-validation.
  double score = 0.0;
  ScoSolution solution;
};

struct PathResult {
  CriterionKind criterion = CriterionKind::BIC;
  std::vector<PathEntry> entries;
  Index chosen_s = 0;
  ScoSolution chosen;
};

/// Index of the smallest score; ties go to the earliest (smallest s) entry.
std::size_t argmin_entry(const std::vector<PathEntry>& entries);

PathResult select_by_criterion(const ScoProblem& problem, std::span<const Index> grid,
                               CriterionKind criterion, SolverKind kind,
                               const SolverConfig& config = {});

/// Builds the problem restricted to the given observation rows.
using ProblemFactory = std::function<ScoProblem(std::span<const Index> rows, Index sparsity)>;

/// Row i of a seeded shuffle goes to fold i mod K.
std::vector<std::vector<Index>> fold_assignment(Index rows, Index folds, std::uint64_t seed);

/// K-fold cross-validation over the grid; the chosen level is refit on all rows.
PathResult cross_validate(const ProblemFactory& factory, Index rows, Index folds,
                          std::span<const Index> grid, SolverKind kind,
                          const SolverConfig& config = {});

}  // namespace sco
