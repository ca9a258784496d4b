#pragma once

// Support-recovery metrics, the exhaustive small-p oracle, benchmark suites
// and the demo programs behind the `sco` command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "sco/model_zoo.hpp"
#include "sco/selection.hpp"
#include "sco/solvers.hpp"

namespace sco {

struct Metrics {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

/// accuracy = recall = |S* n S| / |S*|, precision = |S* n S| / |S| (0 for an
/// empty estimate), f1 = harmonic mean (0 when either factor is 0).
Metrics support_metrics(std::span<const Index> truth, std::span<const Index> estimate, Index p);

/// Largest number of supports exhaustive_oracle will enumerate.
inline constexpr std::uint64_t kOracleSupportLimit = 1'000'000;

/// Restricted minimization over every size-s unit subset; the best objective
/// wins, ties going to the lexicographically smallest support.
ScoSolution exhaustive_oracle(const ScoProblem& problem, const SolverConfig& config = {});

struct BenchRecord {
  std::string solver;
  std::string model;
  Index n = 0;
  Index p = 0;
  Index s_true = 0;
  Index s_used = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double runtime_s = 0.0;
  double objective = 0.0;

  bool operator==(const BenchRecord&) const = default;
};

void write_records_csv(std::ostream& out, std::span<const BenchRecord> records);
std::vector<BenchRecord> read_records_csv(std::istream& in);

/// Per model and solver "mean (sd)" table. Selection suites report recall,
/// precision and F1; the others accuracy. Runtime in seconds throughout.
std::string summary_markdown(std::span<const BenchRecord> records, bool selection);

std::vector<std::string> suite_names();

struct SuiteOptions {
  std::string suite;
  double scale = 1.0;
  std::uint64_t first_seed = 0;
  std::uint64_t last_seed = 19;
  std::vector<SolverKind> solvers{kAllSolvers.begin(), kAllSolvers.end()};
  SolverConfig config;
};

/// Runs every solver on every seed of the suite. Records are ordered by
/// model, solver (registry order), then seed. Every solution is validated;
/// a violation throws std::runtime_error.
std::vector<BenchRecord> run_suite(const SuiteOptions& options);

/// Runs the suite and writes <suite>.csv and <suite>.md under out_dir.
std::vector<BenchRecord> run_suite(const SuiteOptions& options,
                                   const std::filesystem::path& out_dir);

/// The fixed design behind the compressive-sensing demo: Gaussian X
/// (n = 100, p = 10) and noiseless y = X c with c3 = 9.71, c4 = 19.16, c7 = 13.53.
Dataset compressive_sensing_data(std::uint64_t seed = 0);

/// Solves the compressive-sensing demo with GraSP and prints the effective
/// and estimated variables. Writes result.json to out_dir when given.
ScoSolution demo_compressive_sensing(std::ostream& out,
                                     const std::optional<std::filesystem::path>& out_dir);

struct TrendDemoResult {
  Vector observation;
  Vector trend;
  ScoSolution solution;
};

/// Random walk of length n fitted by splicing with s jumps under the
/// unsquared objective |data - cumsum(theta)|. Writes trend.csv and
/// trend.svg to out_dir when given.
TrendDemoResult demo_trend_filter(const std::optional<std::filesystem::path>& out_dir,
                                  Index n = 500, Index s = 10, std::uint64_t seed = 2023);

/// Minimal line chart of the given series.
std::string render_svg(const std::vector<std::pair<std::string, const Vector*>>& series);

/// {solver, support, params, objective, iterations, converged, runtime_s}
nlohmann::ordered_json solution_to_json(SolverKind kind, const ScoSolution& solution);

}  // namespace sco
