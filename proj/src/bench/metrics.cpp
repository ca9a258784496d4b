#include <algorithm>
#include <limits>
#include <stdexcept>

#include "sco/bench.hpp"

namespace sco {

Metrics support_metrics(std::span<const Index> truth, std::span<const Index> estimate, Index p) {
  if (truth.empty()) throw std::invalid_argument("support_metrics: true support is empty");
  const auto in_range = [p](Index j) { return j >= 0 && j < p; };
  if (!std::all_of(truth.begin(), truth.end(), in_range) ||
      !std::all_of(estimate.begin(), estimate.end(), in_range)) {
    throw std::invalid_argument("support_metrics: index outside 0..p-1");
  }
  std::vector<Index> a(truth.begin(), truth.end());
  std::vector<Index> b(estimate.begin(), estimate.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<Index> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));

  Metrics m;
  const auto hits = static_cast<double>(common.size());
  m.recall = hits / static_cast<double>(a.size());
  m.accuracy = m.recall;
  m.precision = b.empty() ? 0.0 : hits / static_cast<double>(b.size());
  m.f1 = (m.precision > 0.0 && m.recall > 0.0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

namespace {

// C(n, k), saturating at limit + 1.
std::uint64_t bounded_binomial(std::uint64_t n, std::uint64_t k, std::uint64_t limit) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    const unsigned __int128 next =
        static_cast<unsigned __int128>(result) * (n - k + i) / i;
    if (next > limit) return limit + 1;
    result = static_cast<std::uint64_t>(next);
  }
  return result;
}

}  // namespace

ScoSolution exhaustive_oracle(const ScoProblem& problem, const SolverConfig& config) {
  const Index units = problem.view().unit_count();
  const Index s = problem.sparsity();
  const std::uint64_t count = bounded_binomial(static_cast<std::uint64_t>(units),
                                               static_cast<std::uint64_t>(s), kOracleSupportLimit);
  if (count > kOracleSupportLimit) {
    throw std::invalid_argument("exhaustive_oracle: more than " +
                                std::to_string(kOracleSupportLimit) + " supports to enumerate");
  }

  auto evaluator = problem.oracle().evaluator();
  const Vector zero = Vector::Zero(problem.dimension());
  std::vector<Index> combo(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) combo[i] = i;

  ScoSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  bool all_converged = true;
  Index enumerated = 0;
  while (true) {
    RestrictedResult fit =
        restricted_minimize(problem, evaluator, problem.unit_coordinates(combo), zero, config);
    ++enumerated;
    all_converged = all_converged && fit.converged;
    if (fit.objective < best.objective) {
      best.params = std::move(fit.params);
      best.objective = fit.objective;
      best.units = combo;
    }
    // Next combination in lexicographic order.
    Index i = s - 1;
    while (i >= 0 && combo[i] == units - s + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (Index j = i + 1; j < s; ++j) combo[j] = combo[j - 1] + 1;
  }
  best.support = problem.unit_coordinates(best.units);
  best.iterations = enumerated;
  best.converged = all_converged;
  return best;
}

}  // namespace sco
