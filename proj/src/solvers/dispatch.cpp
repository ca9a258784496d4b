#include <algorithm>
#include <cctype>
#include <chrono>
#include <string>

#include "sco/solvers.hpp"

namespace sco {

std::string_view solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Forward: return "forward";
    case SolverKind::OMP: return "omp";
    case SolverKind::IHT: return "iht";
    case SolverKind::HTP: return "htp";
    case SolverKind::GraSP: return "grasp";
    case SolverKind::PDAS: return "pdas";
    case SolverKind::FoBa: return "foba";
    case SolverKind::Scope: return "scope";
  }
  return "unknown";
}

std::optional<SolverKind> parse_solver(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered.size() > 6 && lowered.ends_with("solver")) lowered.resize(lowered.size() - 6);
  for (SolverKind kind : kAllSolvers) {
    if (solver_name(kind) == lowered) return kind;
  }
  return std::nullopt;
}

ScoSolution solve(SolverKind kind, const ScoProblem& problem, const SolverConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  ScoSolution solution;
  switch (kind) {
    case SolverKind::Forward: solution = solve_forward(problem, config); break;
    case SolverKind::OMP: solution = solve_omp(problem, config); break;
    case SolverKind::IHT: solution = solve_iht(problem, config); break;
    case SolverKind::HTP: solution = solve_htp(problem, config); break;
    case SolverKind::GraSP: solution = solve_grasp(problem, config); break;
    case SolverKind::PDAS: solution = solve_pdas(problem, config); break;
    case SolverKind::FoBa: solution = solve_foba(problem, config); break;
    case SolverKind::Scope: solution = solve_scope(problem, config); break;
  }
  solution.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return solution;
}

}  // namespace sco
