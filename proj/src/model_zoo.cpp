#include "sco/model_zoo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "util/number_format.hpp"

namespace sco {

namespace {

using Rng = std::mt19937_64;

// Distinct indices drawn uniformly from 0..count-1, sorted.
std::vector<Index> sample_indices(Rng& rng, Index count, Index k) {
  std::vector<Index> pool(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) pool[i] = i;
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, count - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

double random_sign(Rng& rng) { return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0; }

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Vector planted_coefficients(Rng& rng, Index p, const std::vector<Index>& support, double low,
                            double high) {
  Vector theta = Vector::Zero(p);
  std::uniform_real_distribution<double> magnitude(low, high);
  for (Index j : support) theta[j] = random_sign(rng) * magnitude(rng);
  return theta;
}

double sample_variance(const Vector& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(std::max<Index>(v.size() - 1, 1));
}

std::shared_ptr<const Matrix> share(Matrix m) { return std::make_shared<const Matrix>(std::move(m)); }

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::TrendFilter: return "trend";
    case ModelKind::Ising: return "ising";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  for (ModelKind kind :
       {ModelKind::Linear, ModelKind::Logistic, ModelKind::TrendFilter, ModelKind::Ising}) {
    if (model_name(kind) == name) return kind;
  }
  return std::nullopt;
}

double ModelSpec::signal_or_default() const {
  if (signal) return *signal;
  switch (kind) {
    case ModelKind::Linear: return 5.0;
    case ModelKind::Logistic: return 1.0;
    case ModelKind::TrendFilter: return 5.0;
    case ModelKind::Ising: return 0.5;
  }
  return 1.0;
}

void ModelSpec::validate() const {
  if (n < 1 || p < 1 || s_true < 1) throw std::invalid_argument("n, p and s_true must be >= 1");
  if (kind == ModelKind::Ising && p < 2) throw std::invalid_argument("Ising needs at least 2 spins");
  if (s_true > parameter_dimension(*this)) {
    throw std::invalid_argument("s_true exceeds the parameter dimension");
  }
  const double sig = signal_or_default();
  if (std::isnan(sig) || sig < 0.0) throw std::invalid_argument("signal must be nonnegative");
  if (kind == ModelKind::Linear && sig == 0.0) throw std::invalid_argument("SNR must be positive");
}

Index parameter_dimension(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Linear:
    case ModelKind::Logistic: return spec.p;
    case ModelKind::TrendFilter: return spec.n;
    case ModelKind::Ising: return spec.p * (spec.p - 1) / 2;
  }
  return spec.p;
}

Index ising_edge_index(Index q, Index a, Index b) {
  if (a > b) std::swap(a, b);
  // Rows 0..a-1 contribute (q-1) + (q-2) + ... + (q-a) entries.
  return a * q - a * (a + 1) / 2 + (b - a - 1);
}

Dataset gen_linear(const ModelSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset data;
  data.kind = ModelKind::Linear;
  data.x = gaussian_matrix(rng, spec.n, spec.p);
  data.true_support = sample_indices(rng, spec.p, spec.s_true);
  data.theta_true = planted_coefficients(rng, spec.p, data.true_support, 1.0, 2.0);
  const Vector signal = data.x * data.theta_true;
  data.y = signal;
  const double snr = spec.signal_or_default();
  if (std::isfinite(snr)) {
    const double sigma = std::sqrt(sample_variance(signal) / snr);
    std::normal_distribution<double> normal;
    for (Index i = 0; i < spec.n; ++i) data.y[i] += sigma * normal(rng);
  }
  return data;
}

Dataset gen_logistic(const ModelSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset data;
  data.kind = ModelKind::Logistic;
  data.x = gaussian_matrix(rng, spec.n, spec.p);
  data.true_support = sample_indices(rng, spec.p, spec.s_true);
  const double scale = spec.signal_or_default();
  data.theta_true = planted_coefficients(rng, spec.p, data.true_support, scale, 2.0 * scale);
  const Vector eta = data.x * data.theta_true;
  data.y.resize(spec.n);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Index i = 0; i < spec.n; ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
    data.y[i] = uniform(rng) < prob ? 1.0 : 0.0;
  }
  return data;
}

Dataset gen_trend(const ModelSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal;
  Dataset data;
  data.kind = ModelKind::TrendFilter;
  const Index n = spec.n;
  const double jump = spec.signal_or_default();

  if (jump == 0.0) {
    data.theta_true.resize(n);
    for (Index i = 0; i < n; ++i) data.theta_true[i] = normal(rng);
    data.true_support.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) data.true_support[i] = i;
    data.y.resize(n);
    double level = 0.0;
    for (Index i = 0; i < n; ++i) data.y[i] = (level += data.theta_true[i]);
    return data;
  }

  // Jump locations in 1..n-1, at least `gap` apart so each segment is observable.
  const Index gap = std::max<Index>(1, n / (4 * spec.s_true));
  if ((spec.s_true - 1) * gap + 1 > n - 1) {
    throw std::invalid_argument("too many jumps for the series length");
  }
  std::uniform_int_distribution<Index> position(1, n - 1);
  std::vector<Index> jumps;
  while (static_cast<Index>(jumps.size()) < spec.s_true) {
    const Index candidate = position(rng);
    const bool clear = std::none_of(jumps.begin(), jumps.end(),
                                    [&](Index j) { return std::abs(j - candidate) < gap; });
    if (clear) jumps.push_back(candidate);
  }
  std::sort(jumps.begin(), jumps.end());
  data.true_support = jumps;
  data.theta_true = planted_coefficients(rng, n, jumps, jump, jump + 3.0);
  data.y.resize(n);
  double level = 0.0;
  for (Index i = 0; i < n; ++i) {
    level += data.theta_true[i];
    data.y[i] = level + normal(rng);
  }
  return data;
}

Dataset gen_ising(const ModelSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Index q = spec.p;
  const Index edges = parameter_dimension(spec);
  Dataset data;
  data.kind = ModelKind::Ising;
  data.true_support = sample_indices(rng, edges, spec.s_true);
  const double low = spec.signal_or_default();
  data.theta_true = planted_coefficients(rng, edges, data.true_support, low, 2.0 * low);

  Matrix coupling = Matrix::Zero(q, q);
  for (Index a = 0; a < q; ++a) {
    for (Index b = a + 1; b < q; ++b) {
      coupling(a, b) = coupling(b, a) = data.theta_true[ising_edge_index(q, a, b)];
    }
  }

  constexpr int kBurnIn = 200;
  constexpr int kThinning = 10;
  Vector z(q);
  for (Index a = 0; a < q; ++a) z[a] = random_sign(rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto sweep = [&] {
    for (Index a = 0; a < q; ++a) {
      const double field = coupling.row(a).dot(z);
      const double p_up = 1.0 / (1.0 + std::exp(-2.0 * field));
      z[a] = uniform(rng) < p_up ? 1.0 : -1.0;
    }
  };
  for (int t = 0; t < kBurnIn; ++t) sweep();
  data.x.resize(spec.n, q);
  for (Index i = 0; i < spec.n; ++i) {
    for (int t = 0; t < kThinning; ++t) sweep();
    data.x.row(i) = z.transpose();
  }
  return data;
}

Dataset generate(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Linear: return gen_linear(spec);
    case ModelKind::Logistic: return gen_logistic(spec);
    case ModelKind::TrendFilter: return gen_trend(spec);
    case ModelKind::Ising: return gen_ising(spec);
  }
  throw std::invalid_argument("unknown model kind");
}

ObjectiveOracle objective_linear(const Dataset& data) {
  const Expr theta = Expr::parameter(data.x.cols());
  const Expr residual = Expr::constant(data.y) - matvec(share(data.x), theta);
  return build_objective(0.5 * squared_norm(residual), LossScale::HalfResidualSumOfSquares);
}

ObjectiveOracle objective_logistic(const Dataset& data) {
  const Expr theta = Expr::parameter(data.x.cols());
  const Expr eta = matvec(share(data.x), theta);
  return build_objective(sum(log1pexp(eta)) - dot(Expr::constant(data.y), eta),
                         LossScale::NegativeLogLikelihood);
}

ObjectiveOracle objective_trend(const Dataset& data) {
  const Expr theta = Expr::parameter(data.y.size());
  return build_objective(0.5 * squared_norm(Expr::constant(data.y) - cumsum(theta)),
                         LossScale::HalfResidualSumOfSquares);
}

ObjectiveOracle objective_trend_norm(const Dataset& data) {
  const Expr theta = Expr::parameter(data.y.size());
  return build_objective(norm(Expr::constant(data.y) - cumsum(theta)));
}

ObjectiveOracle objective_ising(const Dataset& data) {
  const Index n = data.x.rows();
  const Index q = data.x.cols();
  const Index edges = q * (q - 1) / 2;
  // Row (i, a) holds -2 z_ia z_ib at coupling (a, b), so that the row-wise
  // product with theta is -2 z_ia times the local field of spin a.
  Matrix design = Matrix::Zero(n * q, edges);
  for (Index i = 0; i < n; ++i) {
    for (Index a = 0; a < q; ++a) {
      for (Index b = 0; b < q; ++b) {
        if (b == a) continue;
        design(i * q + a, ising_edge_index(q, a, b)) = -2.0 * data.x(i, a) * data.x(i, b);
      }
    }
  }
  const Expr theta = Expr::parameter(edges);
  return build_objective(sum(log1pexp(matvec(share(std::move(design)), theta))),
                         LossScale::NegativeLogLikelihood);
}

ObjectiveOracle make_objective(const Dataset& data) {
  switch (data.kind) {
    case ModelKind::Linear: return objective_linear(data);
    case ModelKind::Logistic: return objective_logistic(data);
    case ModelKind::TrendFilter: return objective_trend(data);
    case ModelKind::Ising: return objective_ising(data);
  }
  throw std::invalid_argument("unknown model kind");
}

ScoProblem make_problem(const Dataset& data, Index sparsity) {
  ProblemOptions options;
  options.sample_size = data.rows();
  return ScoProblem(make_objective(data), sparsity, std::move(options));
}

Dataset subset_rows(const Dataset& data, std::span<const Index> rows) {
  if (data.kind == ModelKind::TrendFilter) {
    throw std::invalid_argument("trend filtering data cannot be split by rows");
  }
  Dataset out;
  out.kind = data.kind;
  out.theta_true = data.theta_true;
  out.true_support = data.true_support;
  out.x.resize(static_cast<Index>(rows.size()), data.x.cols());
  if (data.y.size() > 0) out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    if (i < 0 || i >= data.x.rows()) throw std::out_of_range("row index out of range");
    out.x.row(static_cast<Index>(r)) = data.x.row(i);
    if (data.y.size() > 0) out.y[static_cast<Index>(r)] = data.y[i];
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const Index rows = data.rows();
  const Index cols = data.x.cols();
  const bool has_y = data.y.size() > 0;
  for (Index j = 0; j < cols; ++j) out << (j ? "," : "") << 'x' << j;
  if (has_y) out << (cols ? "," : "") << 'y';
  out << '\n';
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out << (j ? "," : "") << detail::format_double(data.x(i, j));
    if (has_y) out << (cols ? "," : "") << detail::format_double(data.y[i]);
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in, ModelKind kind) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  Index cols = 0;
  bool has_y = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y" && c + 1 == header.size()) {
      has_y = true;
    } else if (header[c] == "x" + std::to_string(c)) {
      ++cols;
    } else {
      throw std::invalid_argument("unexpected CSV column '" + header[c] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(detail::parse_double(cell));
    if (values.size() != header.size()) throw std::invalid_argument("ragged dataset CSV row");
    rows.push_back(std::move(values));
  }

  Dataset data;
  data.kind = kind;
  const auto n = static_cast<Index>(rows.size());
  data.x.resize(n, cols);
  if (has_y) data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < cols; ++j) data.x(i, j) = rows[i][j];
    if (has_y) data.y[i] = rows[i][cols];
  }
  if (kind == ModelKind::TrendFilter) data.x.resize(0, 0);
  return data;
}

}  // namespace sco
