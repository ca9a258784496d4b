#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "sco/problem.hpp"

namespace sco {

enum class SolverKind { Forward, OMP, IHT, HTP, GraSP, PDAS, FoBa, Scope };

inline constexpr std::array<SolverKind, 8> kAllSolvers = {
    SolverKind::Forward, SolverKind::OMP,  SolverKind::IHT,  SolverKind::HTP,
    SolverKind::GraSP,   SolverKind::PDAS, SolverKind::FoBa, SolverKind::Scope,
};

/// Canonical names: "forward", "omp", "iht", "htp", "grasp", "pdas", "foba", "scope".
std::string_view solver_name(SolverKind kind);
/// Case-insensitive; also accepts the "<Name>Solver" spelling.
std::optional<SolverKind> parse_solver(std::string_view name);

// Each solver returns a feasible ScoSolution whose params are the restricted
// minimizer on the final support. Oracle evaluation errors propagate.

/// Exact greedy forward selection.
ScoSolution solve_forward(const ScoProblem& problem, const SolverConfig& config = {});
/// Orthogonal matching pursuit: add the unit with the largest gradient, refit.
ScoSolution solve_omp(const ScoProblem& problem, const SolverConfig& config = {});
/// Iterative hard thresholding with a backtracking gradient step.
ScoSolution solve_iht(const ScoProblem& problem, const SolverConfig& config = {});
/// Hard thresholding pursuit: thresholded gradient step selects the support, then refit.
ScoSolution solve_htp(const ScoProblem& problem, const SolverConfig& config = {});
/// Gradient support pursuit.
ScoSolution solve_grasp(const ScoProblem& problem, const SolverConfig& config = {});
/// Primal-dual active set iteration.
ScoSolution solve_pdas(const ScoProblem& problem, const SolverConfig& config = {});
/// Adaptive forward-backward greedy selection.
ScoSolution solve_foba(const ScoProblem& problem, const SolverConfig& config = {});
/// Splicing: swap low-sacrifice active units for high-sacrifice inactive ones.
ScoSolution solve_scope(const ScoProblem& problem, const SolverConfig& config = {});

/// Dispatches to the solver for `kind` and records its wall-clock runtime.
ScoSolution solve(SolverKind kind, const ScoProblem& problem, const SolverConfig& config = {});

}  // namespace sco
