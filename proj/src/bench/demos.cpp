#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "sco/bench.hpp"
#include "util/number_format.hpp"

namespace sco {

namespace {

// Array printing in the style of numpy: right-aligned integer parts, decimal
// points lined up, at most two decimals with trailing zeros dropped.
std::string format_numbers(const std::vector<double>& values) {
  std::vector<std::string> whole;
  std::vector<std::string> frac;
  std::size_t whole_width = 0;
  std::size_t frac_width = 0;
  for (double v : values) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.2f", std::round(v * 100.0) / 100.0);
    std::string text = buffer;
    if (text == "-0.00") text = "0.00";
    const auto dot = text.find('.');
    std::string f = text.substr(dot + 1);
    while (!f.empty() && f.back() == '0') f.pop_back();
    whole.push_back(text.substr(0, dot));
    frac.push_back(f);
    whole_width = std::max(whole_width, whole.back().size());
    frac_width = std::max(frac_width, f.size());
  }
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::string(whole_width - whole[i].size(), ' ') + whole[i] + '.' + frac[i] +
           std::string(frac_width - frac[i].size(), ' ');
  }
  return out + "]";
}

std::string format_indices(const std::vector<Index>& values) {
  std::size_t width = 0;
  for (Index v : values) width = std::max(width, std::to_string(v).size());
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ' ';
    const std::string text = std::to_string(values[i]);
    out += std::string(width - text.size(), ' ') + text;
  }
  return out + "]";
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

Dataset compressive_sensing_data(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Dataset data;
  data.kind = ModelKind::Linear;
  data.x.resize(100, 10);
  for (Index j = 0; j < data.x.cols(); ++j) {
    for (Index i = 0; i < data.x.rows(); ++i) data.x(i, j) = normal(rng);
  }
  data.theta_true = Vector::Zero(10);
  data.theta_true[3] = 9.71;
  data.theta_true[4] = 19.16;
  data.theta_true[7] = 13.53;
  data.true_support = {3, 4, 7};
  data.y = data.x * data.theta_true;
  return data;
}

ScoSolution demo_compressive_sensing(std::ostream& out,
                                     const std::optional<std::filesystem::path>& out_dir) {
  const Dataset data = compressive_sensing_data();
  const ScoSolution solution = solve(SolverKind::GraSP, make_problem(data, 3));

  std::vector<double> truth;
  for (Index j : data.true_support) truth.push_back(data.theta_true[j]);
  std::vector<double> estimate;
  for (Index j : solution.support) estimate.push_back(solution.params[j]);
  out << "Effective variables:  " << format_indices(data.true_support)
      << " coefficients:  " << format_numbers(truth) << '\n';
  out << "Estimated variables:  " << format_indices(solution.support)
      << " estimated coefficients: " << format_numbers(estimate) << '\n';

  if (out_dir) {
    ensure_directory(*out_dir);
    write_file(*out_dir / "result.json",
               solution_to_json(SolverKind::GraSP, solution).dump(2) + "\n");
  }
  return solution;
}

TrendDemoResult demo_trend_filter(const std::optional<std::filesystem::path>& out_dir, Index n,
                                  Index s, std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = ModelKind::TrendFilter;
  spec.n = n;
  spec.p = n;
  spec.s_true = std::min<Index>(s, n);
  spec.signal = 0.0;
  spec.seed = seed;
  const Dataset data = gen_trend(spec);
  ProblemOptions options;
  options.sample_size = n;
  ScoProblem problem(objective_trend_norm(data), s, std::move(options));

  TrendDemoResult result;
  result.solution = solve(SolverKind::Scope, problem);
  result.observation = data.y;
  result.trend.resize(n);
  double level = 0.0;
  for (Index i = 0; i < n; ++i) result.trend[i] = (level += result.solution.params[i]);

  if (out_dir) {
    ensure_directory(*out_dir);
    std::ostringstream csv;
    csv << "observation,trend\n";
    for (Index i = 0; i < n; ++i) {
      csv << detail::format_double(result.observation[i]) << ','
          << detail::format_double(result.trend[i]) << '\n';
    }
    write_file(*out_dir / "trend.csv", csv.str());
    write_file(*out_dir / "trend.svg", render_svg({{"observation", &result.observation},
                                                   {"filtering trend", &result.trend}}));
  }
  return result;
}

std::string render_svg(const std::vector<std::pair<std::string, const Vector*>>& series) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 400.0;
  constexpr double kMargin = 40.0;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

  double lo = 0.0;
  double hi = 0.0;
  Index length = 0;
  bool first = true;
  for (const auto& [name, values] : series) {
    if (values->size() == 0) continue;
    lo = first ? values->minCoeff() : std::min(lo, values->minCoeff());
    hi = first ? values->maxCoeff() : std::max(hi, values->maxCoeff());
    length = std::max(length, values->size());
    first = false;
  }
  if (hi <= lo) hi = lo + 1.0;
  const double dx = length > 1 ? (kWidth - 2 * kMargin) / static_cast<double>(length - 1) : 0.0;
  const double dy = (kHeight - 2 * kMargin) / (hi - lo);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#999\"/>\n";
  char point[64];
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Vector& values = *series[k].second;
    const char* color = kColors[k % 4];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << (k == 0 ? "0.8" : "1.5") << "\" points=\"";
    for (Index i = 0; i < values.size(); ++i) {
      std::snprintf(point, sizeof(point), "%s%.2f,%.2f", i > 0 ? " " : "",
                    kMargin + dx * static_cast<double>(i), kHeight - kMargin - dy * (values[i] - lo));
      svg << point;
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 18 + 16 * static_cast<double>(k)
        << "\" font-size=\"12\" fill=\"" << color << "\">" << series[k].first << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

nlohmann::ordered_json solution_to_json(SolverKind kind, const ScoSolution& solution) {
  nlohmann::ordered_json j;
  j["solver"] = std::string(solver_name(kind));
  j["support"] = solution.support;
  j["params"] = std::vector<double>(solution.params.begin(), solution.params.end());
  j["objective"] = solution.objective;
  j["iterations"] = solution.iterations;
  j["converged"] = solution.converged;
  j["runtime_s"] = solution.runtime_seconds;
  return j;
}

}  // namespace sco
