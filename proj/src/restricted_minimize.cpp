#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "sco/problem.hpp"

namespace sco {

namespace {

constexpr std::size_t kMemory = 10;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;

struct Correction {
  Vector s;
  Vector y;
  double rho;
};

// Two-loop recursion: returns -H g for the current inverse-Hessian estimate.
Vector lbfgs_direction(const Vector& g, const std::deque<Correction>& memory) {
  Vector q = g;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q.noalias() -= alpha[i] * memory[i].y;
  }
  if (memory.empty()) {
    const double gnorm = g.norm();
    if (gnorm > 1.0) q /= gnorm;
  } else {
    const Correction& last = memory.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q.noalias() += (alpha[i] - beta) * memory[i].s;
  }
  return -q;
}

}  // namespace

RestrictedResult restricted_minimize(const ScoProblem& problem, std::span<const Index> support,
                                     const Vector& init, const SolverConfig& config) {
  auto evaluator = problem.oracle().evaluator();
  return restricted_minimize(problem, evaluator, support, init, config);
}

RestrictedResult restricted_minimize(const ScoProblem& problem,
                                     ObjectiveOracle::Evaluator& evaluator,
                                     std::span<const Index> support, const Vector& init,
                                     const SolverConfig& config) {
  const Index p = problem.dimension();
  if (init.size() != p) throw std::invalid_argument("restricted_minimize: init has wrong size");

  std::vector<Index> free(support.begin(), support.end());
  free.insert(free.end(), problem.preselect().begin(), problem.preselect().end());
  std::sort(free.begin(), free.end());
  free.erase(std::unique(free.begin(), free.end()), free.end());
  if (!free.empty() && (free.front() < 0 || free.back() >= p)) {
    throw std::invalid_argument("restricted_minimize: support index out of range");
  }

  RestrictedResult result;
  Vector theta = Vector::Zero(p);
  for (Index j : free) theta[j] = init[j];

  if (free.empty()) {
    result.objective = evaluator.value(theta);
    result.params = std::move(theta);
    result.converged = true;
    return result;
  }

  const auto k = static_cast<Index>(free.size());
  Vector full_grad;
  const auto gather = [&](const Vector& full) {
    Vector out(k);
    for (Index i = 0; i < k; ++i) out[i] = full[free[i]];
    return out;
  };

  double f = evaluator.value_and_gradient(theta, free, full_grad);
  Vector x = gather(theta);
  Vector g = gather(full_grad);
  std::deque<Correction> memory;
  Vector trial = theta;

  Index iter = 0;
  bool converged = g.lpNorm<Eigen::Infinity>() <= config.inner_tol;
  while (!converged && iter < config.inner_max_iter) {
    Vector d = lbfgs_direction(g, memory);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      memory.clear();
      d = lbfgs_direction(g, memory);
      slope = g.dot(d);
    }

    bool accepted = false;
    double alpha = 1.0;
    double f_new = f;
    Vector x_new;
    Vector g_new;
    const double g_inf = g.lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, alpha *= 0.5) {
      if (alpha * d.lpNorm<Eigen::Infinity>() <= 1e-16 * scale) break;
      x_new = x + alpha * d;
      for (Index i = 0; i < k; ++i) trial[free[i]] = x_new[i];
      try {
        f_new = evaluator.value_and_gradient(trial, free, full_grad);
      } catch (const EvaluationError&) {
        continue;  // left the objective's domain; shorten the step
      }
      g_new = gather(full_grad);
      // The second clause accepts steps whose decrease is below the
      // resolution of f but which still reduce the gradient.
      if (f_new <= f + kArmijo * alpha * slope ||
          (f_new <= f && g_new.lpNorm<Eigen::Infinity>() < g_inf)) {
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      break;
    }

    Vector s = x_new - x;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (memory.size() == kMemory) memory.pop_front();
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    ++iter;
    converged = g.lpNorm<Eigen::Infinity>() <= config.inner_tol;
  }

  for (Index i = 0; i < k; ++i) theta[free[i]] = x[i];
  result.params = std::move(theta);
  result.objective = f;
  result.iterations = iter;
  result.converged = converged;
  return result;
}

}  // namespace sco
