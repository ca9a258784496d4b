#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "sco/bench.hpp"

namespace sco {

namespace {

struct SuiteModel {
  ModelSpec spec;
  std::optional<CriterionKind> criterion;
};

ModelSpec spec_of(ModelKind kind, Index n, Index p, Index s_true) {
  ModelSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.p = p;
  spec.s_true = s_true;
  return spec;
}

std::vector<SuiteModel> suite_models(const std::string& suite) {
  const ModelSpec linear = spec_of(ModelKind::Linear, 500, 1000, 10);
  const ModelSpec logistic = spec_of(ModelKind::Logistic, 500, 1000, 10);
  const ModelSpec trend = spec_of(ModelKind::TrendFilter, 200, 200, 5);
  const ModelSpec ising = spec_of(ModelKind::Ising, 500, 10, 8);
  if (suite == "a2-linear") return {{linear, std::nullopt}};
  if (suite == "a2-logistic") return {{logistic, std::nullopt}};
  if (suite == "a2-trend") return {{trend, std::nullopt}};
  if (suite == "a2-ising") return {{ising, std::nullopt}};
  if (suite == "selection-a3") {
    return {{linear, CriterionKind::SIC},
            {logistic, CriterionKind::GIC},
            {trend, CriterionKind::BIC},
            {ising, CriterionKind::GIC}};
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

Index scaled(Index value, double scale) {
  return std::max<Index>(1, static_cast<Index>(std::ceil(static_cast<double>(value) * scale)));
}

ModelSpec scale_spec(ModelSpec spec, double scale) {
  spec.n = scaled(spec.n, scale);
  spec.p = spec.kind == ModelKind::TrendFilter ? spec.n : scaled(spec.p, scale);
  if (spec.kind == ModelKind::Ising) spec.p = std::max<Index>(spec.p, 2);
  spec.s_true = scaled(spec.s_true, scale);
  const Index dim = parameter_dimension(spec);
  const Index cap = spec.kind == ModelKind::TrendFilter ? dim - 1 : dim;
  spec.s_true = std::min(spec.s_true, std::max<Index>(cap, 1));
  return spec;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"a2-linear", "a2-logistic", "a2-trend", "a2-ising", "selection-a3"};
}

std::vector<BenchRecord> run_suite(const SuiteOptions& options) {
  if (!(options.scale > 0.0 && options.scale <= 1.0)) {
    throw std::invalid_argument("scale must lie in (0, 1]");
  }
  if (options.first_seed > options.last_seed) {
    throw std::invalid_argument("empty seed range");
  }
  if (options.solvers.empty()) throw std::invalid_argument("no solvers selected");
  options.config.validate();
  const auto models = suite_models(options.suite);

  std::vector<BenchRecord> records;
  for (const SuiteModel& model : models) {
    ModelSpec spec = scale_spec(model.spec, options.scale);
    for (std::uint64_t seed = options.first_seed;; ++seed) {
      spec.seed = seed;
      const Dataset data = generate(spec);
      const Index dim = parameter_dimension(spec);
      for (SolverKind kind : options.solvers) {
        ScoSolution solution;
        Index s_used = spec.s_true;
        double runtime = 0.0;
        const ScoProblem base = make_problem(data, spec.s_true);
        if (model.criterion) {
          const Index top = std::min<Index>(2 * spec.s_true, base.view().unit_count());
          std::vector<Index> grid(static_cast<std::size_t>(top));
          std::iota(grid.begin(), grid.end(), Index{1});
          const auto start = std::chrono::steady_clock::now();
          PathResult path = select_by_criterion(base, grid, *model.criterion, kind, options.config);
          runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          s_used = path.chosen_s;
          solution = std::move(path.chosen);
        } else {
          solution = solve(kind, base, options.config);
          runtime = solution.runtime_seconds;
        }

        const auto issues = validate_solution(base.with_sparsity(s_used), solution, 1e-9);
        if (!issues.empty()) {
          throw std::runtime_error(std::string(solver_name(kind)) + " on " +
                                   std::string(model_name(spec.kind)) + " seed " +
                                   std::to_string(seed) + ": " + issues.front());
        }

        const Metrics m = support_metrics(data.true_support, solution.support, dim);
        BenchRecord r;
        r.solver = solver_name(kind);
        r.model = model_name(spec.kind);
        r.n = spec.n;
        r.p = dim;
        r.s_true = spec.s_true;
        r.s_used = s_used;
        r.seed = seed;
        r.accuracy = m.accuracy;
        r.recall = m.recall;
        r.precision = m.precision;
        r.f1 = m.f1;
        r.runtime_s = runtime;
        r.objective = solution.objective;
        records.push_back(std::move(r));
      }
      if (seed == options.last_seed) break;
    }
  }

  // Model order as listed by the suite, then solver registry order, then seed.
  const auto model_rank = [&models](const std::string& name) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (model_name(models[i].spec.kind) == name) return i;
    }
    return models.size();
  };
  const auto solver_rank = [](const std::string& name) {
    return static_cast<std::size_t>(*parse_solver(name));
  };
  std::stable_sort(records.begin(), records.end(), [&](const BenchRecord& a, const BenchRecord& b) {
    const auto ka = std::make_tuple(model_rank(a.model), solver_rank(a.solver), a.seed);
    const auto kb = std::make_tuple(model_rank(b.model), solver_rank(b.solver), b.seed);
    return ka < kb;
  });
  return records;
}

std::vector<BenchRecord> run_suite(const SuiteOptions& options,
                                   const std::filesystem::path& out_dir) {
  suite_models(options.suite);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  // Fail before the expensive part when the target is unwritable.
  const auto csv_path = out_dir / (options.suite + ".csv");
  const auto md_path = out_dir / (options.suite + ".md");
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());

  auto records = run_suite(options);
  write_records_csv(csv, records);
  std::ofstream md(md_path);
  if (!md) throw std::runtime_error("cannot write " + md_path.string());
  md << "# " << options.suite << "\n\n"
     << summary_markdown(records, options.suite == "selection-a3");
  if (!csv || !md) throw std::runtime_error("write failed under " + out_dir.string());
  return records;
}

}  // namespace sco
