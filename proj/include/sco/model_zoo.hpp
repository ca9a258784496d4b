#pragma once

// Benchmark objectives and their synthetic data generators.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sco/problem.hpp"

namespace sco {

enum class ModelKind { Linear, Logistic, TrendFilter, Ising };

std::string_view model_name(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  Index n = 100;
  /// Number of features; for Ising the number of spins q (the parameters
  /// are the q(q-1)/2 couplings); ignored for trend filtering (p = n).
  Index p = 10;
  Index s_true = 3;
  /// Linear: signal-to-noise ratio var(X theta*) / var(noise), infinity for
  ///   noiseless data.
  /// Logistic: multiplier on the coefficient magnitudes (default 1).
  /// TrendFilter: minimum jump magnitude; 0 gives a plain random walk.
  /// Ising: minimum coupling magnitude (default 0.5).
  std::optional<double> signal;
  std::uint64_t seed = 0;

  double signal_or_default() const;
  void validate() const;
};

/// Length of the parameter vector a spec produces.
Index parameter_dimension(const ModelSpec& spec);

struct Dataset {
  ModelKind kind = ModelKind::Linear;
  /// Design matrix (n x p), spin matrix (n x q) for Ising, empty for trend filtering.
  Matrix x;
  /// Response; the observed series for trend filtering; empty for Ising.
  Vector y;
  Vector theta_true;
  std::vector<Index> true_support;

  Index rows() const { return kind == ModelKind::TrendFilter ? y.size() : x.rows(); }
};

/// Gaussian design, planted coefficients of magnitude in [1, 2] with random sign.
Dataset gen_linear(const ModelSpec& spec);
/// Gaussian design, y ~ Bernoulli(sigmoid(x' theta*)).
Dataset gen_logistic(const ModelSpec& spec);
/// Piecewise-constant signal with s_true jumps plus unit Gaussian noise, or
/// a Gaussian random walk when the signal is 0.
Dataset gen_trend(const ModelSpec& spec);
/// Spins sampled from a sparse Ising model by Gibbs sampling.
Dataset gen_ising(const ModelSpec& spec);
Dataset generate(const ModelSpec& spec);

/// 1/2 |y - X theta|^2
ObjectiveOracle objective_linear(const Dataset& data);
/// sum log(1 + exp(x_i' theta)) - y_i x_i' theta
ObjectiveOracle objective_logistic(const Dataset& data);
/// 1/2 |data - cumsum(theta)|^2
ObjectiveOracle objective_trend(const Dataset& data);
/// |data - cumsum(theta)|, the unsquared variant.
ObjectiveOracle objective_trend_norm(const Dataset& data);
/// Negative log pseudo-likelihood over all nodes and samples.
ObjectiveOracle objective_ising(const Dataset& data);
ObjectiveOracle make_objective(const Dataset& data);

/// Position of coupling (a, b), a < b, in the Ising parameter vector.
Index ising_edge_index(Index q, Index a, Index b);

ScoProblem make_problem(const Dataset& data, Index sparsity);

/// Rows of a dataset (observations); not defined for trend filtering.
Dataset subset_rows(const Dataset& data, std::span<const Index> rows);

/// Header x0..x{p-1} then y (columns absent when the dataset has none).
void write_dataset_csv(std::ostream& out, const Dataset& data);
/// Reads the X and y columns back; true parameters are not part of the file.
Dataset read_dataset_csv(std::istream& in, ModelKind kind);

}  // namespace sco
