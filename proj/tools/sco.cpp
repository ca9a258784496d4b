// sco: demos, single solves, benchmark suites and sparsity selection.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sco/bench.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 3;

// A usage problem detected after argument parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text, const char* flag) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::int64_t v = std::stoll(text);
      return {v, v};
    }
    std::size_t used = 0;
    const std::string lo = text.substr(0, dots);
    const std::string hi = text.substr(dots + 2);
    const std::int64_t a = std::stoll(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    const std::int64_t b = std::stoll(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    if (a > b) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError(std::string(flag) + ": expected A..B, got '" + text + "'");
  }
}

sco::SolverKind solver_or_throw(const std::string& name) {
  const auto kind = sco::parse_solver(name);
  if (!kind) throw UsageError("unknown solver '" + name + "'");
  return *kind;
}

struct ModelArgs {
  std::string model = "linear";
  sco::Index n = 100;
  sco::Index p = 10;
  sco::Index s_true = 3;
  std::optional<double> signal;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--model", model, "linear | logistic | trend | ising")->capture_default_str();
    app.add_option("--n", n, "observations (series length for trend)")->capture_default_str();
    app.add_option("--p", p, "features (spins for ising; ignored for trend)")
        ->capture_default_str();
    app.add_option("--s-true", s_true, "planted sparsity")->capture_default_str();
    app.add_option("--signal", signal, "SNR / signal magnitude of the generator");
    app.add_option("--seed", seed, "data seed")->capture_default_str();
  }

  sco::ModelSpec spec() const {
    const auto kind = sco::parse_model(model);
    if (!kind) throw UsageError("unknown model '" + model + "'");
    sco::ModelSpec spec;
    spec.kind = *kind;
    spec.n = n;
    spec.p = *kind == sco::ModelKind::TrendFilter ? n : p;
    spec.s_true = s_true;
    spec.signal = signal;
    spec.seed = seed;
    spec.validate();
    return spec;
  }
};

void write_json(const std::optional<std::string>& path, const nlohmann::ordered_json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (!path) {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(*path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream out(target);
  if (!out) throw std::runtime_error("cannot write " + *path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + *path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsity-constrained optimization toolkit"};
  app.require_subcommand(1);

  // demo
  auto* demo = app.add_subcommand("demo", "compressive-sensing | trend-filter");
  std::string demo_name;
  std::optional<std::string> demo_out;
  demo->add_option("name", demo_name)->required()->check(
      CLI::IsMember({"compressive-sensing", "trend-filter"}));
  demo->add_option("--out", demo_out, "output directory");

  // solve
  auto* solve = app.add_subcommand("solve", "generate a dataset and solve it");
  ModelArgs solve_model;
  solve_model.add_to(*solve);
  sco::Index solve_s = 3;
  std::string solve_solver = "scope";
  std::optional<std::string> solve_out;
  solve->add_option("--s", solve_s, "sparsity budget")->capture_default_str();
  solve->add_option("--solver", solve_solver, "solver name, or 'oracle' for exhaustive search")
      ->capture_default_str();
  solve->add_option("--out", solve_out, "result JSON (stdout when absent)");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string bench_suite;
  double bench_scale = 1.0;
  std::string bench_seeds = "0..19";
  std::string bench_out;
  std::vector<std::string> bench_solvers;
  bench->add_option("--suite", bench_suite)->required()->check(CLI::IsMember(sco::suite_names()));
  bench->add_option("--scale", bench_scale, "dimension multiplier in (0, 1]")
      ->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "seed range A..B")->capture_default_str();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--solvers", bench_solvers, "subset of solvers (default all)");

  // select
  auto* select = app.add_subcommand("select", "choose the sparsity level");
  ModelArgs select_model;
  select_model.add_to(*select);
  std::string select_criterion = "bic";
  sco::Index select_folds = 5;
  std::string select_grid = "1..10";
  std::string select_solver = "scope";
  std::uint64_t select_cv_seed = 0;
  std::optional<std::string> select_out;
  select->add_option("--criterion", select_criterion)
      ->check(CLI::IsMember({"aic", "bic", "gic", "sic", "cv"}))
      ->capture_default_str();
  select->add_option("--k-folds", select_folds, "folds for cv")->capture_default_str();
  select->add_option("--grid", select_grid, "sparsity range A..B")->capture_default_str();
  select->add_option("--solver", select_solver)->capture_default_str();
  select->add_option("--cv-seed", select_cv_seed, "fold shuffling seed")->capture_default_str();
  select->add_option("--out", select_out, "result JSON (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*demo) {
      std::optional<std::filesystem::path> dir;
      if (demo_out) dir = *demo_out;
      if (demo_name == "compressive-sensing") {
        sco::demo_compressive_sensing(std::cout, dir);
      } else {
        const auto result = sco::demo_trend_filter(dir);
        std::cout << "trend filter: " << result.solution.support.size()
                  << " jumps, objective " << result.solution.objective << '\n';
      }
    } else if (*solve) {
      const sco::ModelSpec spec = solve_model.spec();
      const sco::Dataset data = sco::generate(spec);
      const sco::ScoProblem problem = sco::make_problem(data, solve_s);
      nlohmann::ordered_json doc;
      if (solve_solver == "oracle") {
        const auto start = std::chrono::steady_clock::now();
        sco::ScoSolution solution = sco::exhaustive_oracle(problem);
        solution.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        doc = sco::solution_to_json(sco::SolverKind::Scope, solution);
        doc["solver"] = "oracle";
      } else {
        const sco::SolverKind kind = solver_or_throw(solve_solver);
        doc = sco::solution_to_json(kind, sco::solve(kind, problem));
      }
      write_json(solve_out, doc);
    } else if (*bench) {
      sco::SuiteOptions options;
      options.suite = bench_suite;
      options.scale = bench_scale;
      const auto [first, last] = parse_range(bench_seeds, "--seeds");
      if (first < 0) throw UsageError("--seeds: seeds must be non-negative");
      options.first_seed = static_cast<std::uint64_t>(first);
      options.last_seed = static_cast<std::uint64_t>(last);
      if (!bench_solvers.empty()) {
        options.solvers.clear();
        for (const auto& name : bench_solvers) options.solvers.push_back(solver_or_throw(name));
      }
      if (!(bench_scale > 0.0 && bench_scale <= 1.0)) throw UsageError("--scale must lie in (0, 1]");
      const auto records = sco::run_suite(options, bench_out);
      std::cout << "wrote " << records.size() << " records to "
                << (std::filesystem::path(bench_out) / (bench_suite + ".csv")).string() << '\n';
    } else if (*select) {
      const sco::ModelSpec spec = select_model.spec();
      const sco::Dataset data = sco::generate(spec);
      const sco::SolverKind kind = solver_or_throw(select_solver);
      const auto [lo, hi] = parse_range(select_grid, "--grid");
      if (lo < 1) throw UsageError("--grid: levels start at 1");
      std::vector<sco::Index> grid(static_cast<std::size_t>(hi - lo + 1));
      std::iota(grid.begin(), grid.end(), static_cast<sco::Index>(lo));
      const auto criterion = *sco::parse_criterion(select_criterion);

      sco::PathResult result;
      if (criterion == sco::CriterionKind::CrossValidation) {
        sco::SolverConfig config;
        config.seed = select_cv_seed;
        const sco::ProblemFactory factory = [&data](std::span<const sco::Index> rows,
                                                    sco::Index s) {
          return sco::make_problem(sco::subset_rows(data, rows), s);
        };
        result = sco::cross_validate(factory, data.rows(), select_folds, grid, kind, config);
      } else {
        result = sco::select_by_criterion(sco::make_problem(data, grid.back()), grid, criterion,
                                          kind);
      }
      nlohmann::ordered_json doc;
      doc["criterion"] = select_criterion;
      doc["chosen_s"] = result.chosen_s;
      doc["path"] = nlohmann::ordered_json::array();
      for (const auto& entry : result.entries) {
        doc["path"].push_back({{"s", entry.s},
                               {"score", entry.score},
                               {"objective", entry.solution.objective}});
      }
      doc["solution"] = sco::solution_to_json(kind, result.chosen);
      write_json(select_out, doc);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
