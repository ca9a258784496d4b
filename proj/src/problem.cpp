#include "sco/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sco {

namespace {

std::vector<bool> preselect_mask(Index dimension, std::span<const Index> preselect) {
  std::vector<bool> mask(static_cast<std::size_t>(dimension), false);
  for (Index j : preselect) {
    if (j < 0 || j >= dimension) {
      throw std::invalid_argument("preselected coordinate " + std::to_string(j) +
                                  " out of range");
    }
    if (mask[j]) throw std::invalid_argument("duplicate preselected coordinate");
    mask[j] = true;
  }
  return mask;
}

}  // namespace

GroupView GroupView::singletons(Index dimension, std::span<const Index> preselect) {
  const auto mask = preselect_mask(dimension, preselect);
  GroupView view;
  view.unit_of_.assign(static_cast<std::size_t>(dimension), -1);
  for (Index j = 0; j < dimension; ++j) {
    if (mask[j]) continue;
    view.unit_of_[j] = view.unit_count();
    view.coords_.push_back(j);
    view.offsets_.push_back(static_cast<Index>(view.coords_.size()));
  }
  return view;
}

GroupView GroupView::from_groups(std::span<const Index> group_ids,
                                 std::span<const Index> preselect) {
  const auto dimension = static_cast<Index>(group_ids.size());
  const auto mask = preselect_mask(dimension, preselect);
  Index groups = 0;
  for (Index j = 0; j < dimension; ++j) {
    const Index id = group_ids[j];
    if (mask[j] != (id == -1)) {
      throw std::invalid_argument("coordinate " + std::to_string(j) +
                                  ": group id must be -1 exactly for preselected coordinates");
    }
    if (id < -1) throw std::invalid_argument("negative group id");
    groups = std::max(groups, id + 1);
  }
  std::vector<Index> counts(static_cast<std::size_t>(groups), 0);
  for (Index id : group_ids) {
    if (id >= 0) ++counts[id];
  }
  for (Index g = 0; g < groups; ++g) {
    if (counts[g] == 0) throw std::invalid_argument("group id " + std::to_string(g) + " unused");
  }

  GroupView view;
  view.unit_of_.assign(group_ids.begin(), group_ids.end());
  view.offsets_.assign(static_cast<std::size_t>(groups) + 1, 0);
  for (Index g = 0; g < groups; ++g) view.offsets_[g + 1] = view.offsets_[g] + counts[g];
  view.coords_.resize(static_cast<std::size_t>(view.offsets_.back()));
  std::vector<Index> fill(view.offsets_.begin(), view.offsets_.end() - 1);
  for (Index j = 0; j < dimension; ++j) {
    if (group_ids[j] >= 0) view.coords_[fill[group_ids[j]]++] = j;
  }
  return view;
}

double GroupView::squared_score(const Vector& v, Index unit) const {
  double total = 0.0;
  for (Index j : coordinates(unit)) total += v[j] * v[j];
  return total;
}

double GroupView::score(const Vector& v, Index unit) const {
  return std::sqrt(squared_score(v, unit));
}

ScoProblem::ScoProblem(ObjectiveOracle oracle, Index sparsity, ProblemOptions options)
    : oracle_(std::move(oracle)), sparsity_(sparsity), options_(std::move(options)) {
  const Index p = oracle_.dimension();
  std::sort(options_.preselect.begin(), options_.preselect.end());
  if (options_.groups.empty()) {
    view_ = GroupView::singletons(p, options_.preselect);
  } else {
    if (static_cast<Index>(options_.groups.size()) != p) {
      throw std::invalid_argument("groups must have one entry per coordinate");
    }
    view_ = GroupView::from_groups(options_.groups, options_.preselect);
  }
  if (sparsity_ < 1 || sparsity_ > view_.unit_count()) {
    throw std::invalid_argument("sparsity " + std::to_string(sparsity_) + " outside 1.." +
                                std::to_string(view_.unit_count()));
  }
  if (options_.sample_size && *options_.sample_size < 1) {
    throw std::invalid_argument("sample size must be positive");
  }
}

ScoProblem ScoProblem::with_sparsity(Index sparsity) const {
  return ScoProblem(oracle_, sparsity, options_);
}

std::vector<Index> ScoProblem::unit_coordinates(std::span<const Index> units) const {
  std::vector<Index> coords;
  for (Index u : units) {
    const auto c = view_.coordinates(u);
    coords.insert(coords.end(), c.begin(), c.end());
  }
  std::sort(coords.begin(), coords.end());
  return coords;
}

std::vector<Index> ScoProblem::free_coordinates(std::span<const Index> units) const {
  std::vector<Index> coords = unit_coordinates(units);
  coords.insert(coords.end(), options_.preselect.begin(), options_.preselect.end());
  std::sort(coords.begin(), coords.end());
  return coords;
}

void SolverConfig::validate() const {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (inner_max_iter < 1) throw std::invalid_argument("inner_max_iter must be at least 1");
  if (!(tol > 0.0) || !(inner_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (!(foba_backward_factor > 0.0) || foba_backward_factor >= 1.0) {
    throw std::invalid_argument("foba_backward_factor must lie in (0, 1)");
  }
}

std::vector<Index> hard_threshold(const Vector& v, Index s, const GroupView& view) {
  const Index units = view.unit_count();
  if (s < 0 || s > units) {
    throw std::invalid_argument("hard_threshold: s=" + std::to_string(s) + " exceeds " +
                                std::to_string(units) + " units");
  }
  std::vector<double> scores(static_cast<std::size_t>(units));
  for (Index u = 0; u < units; ++u) scores[u] = view.squared_score(v, u);
  std::vector<Index> order(static_cast<std::size_t>(units));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + s, order.end(), [&](Index a, Index b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });
  order.resize(static_cast<std::size_t>(s));
  std::sort(order.begin(), order.end());
  return order;
}

Vector project_feasible(const Vector& v, const ScoProblem& problem) {
  Vector out = Vector::Zero(v.size());
  for (Index j : problem.free_coordinates(hard_threshold(v, problem.sparsity(), problem.view()))) {
    out[j] = v[j];
  }
  return out;
}

std::vector<std::string> validate_solution(const ScoProblem& problem, const ScoSolution& solution,
                                           double objective_tol) {
  std::vector<std::string> issues;
  const Index p = problem.dimension();
  if (solution.params.size() != p) {
    issues.push_back("params has size " + std::to_string(solution.params.size()));
    return issues;
  }
  const auto& units = solution.units;
  if (!std::is_sorted(units.begin(), units.end()) ||
      std::adjacent_find(units.begin(), units.end()) != units.end()) {
    issues.emplace_back("units are not sorted and unique");
  }
  for (Index u : units) {
    if (u < 0 || u >= problem.view().unit_count()) {
      issues.push_back("unit " + std::to_string(u) + " out of range");
      return issues;
    }
  }
  if (static_cast<Index>(units.size()) > problem.sparsity()) {
    issues.push_back(std::to_string(units.size()) + " selected units exceed sparsity " +
                     std::to_string(problem.sparsity()));
  }
  if (solution.support != problem.unit_coordinates(units)) {
    issues.emplace_back("support does not match the selected units");
  }
  std::vector<bool> allowed(static_cast<std::size_t>(p), false);
  for (Index j : problem.free_coordinates(units)) allowed[j] = true;
  for (Index j = 0; j < p; ++j) {
    if (!allowed[j] && solution.params[j] != 0.0) {
      issues.push_back("coordinate " + std::to_string(j) + " is nonzero off the support");
      break;
    }
  }
  if (!std::isfinite(solution.objective)) {
    issues.emplace_back("objective is not finite");
  } else {
    const double recomputed = problem.oracle().value(solution.params);
    if (std::abs(recomputed - solution.objective) >
        objective_tol * std::max(1.0, std::abs(recomputed))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "objective " << solution.objective << " differs from recomputed " << recomputed;
      issues.push_back(msg.str());
    }
  }
  if (solution.runtime_seconds < 0.0) issues.emplace_back("negative runtime");
  return issues;
}

}  // namespace sco
