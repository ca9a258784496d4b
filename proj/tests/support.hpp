#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "sco/ad.hpp"
#include "sco/problem.hpp"

namespace sco::testing {

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Vector gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// n x p with orthonormal columns.
inline Matrix orthonormal_columns(std::mt19937_64& rng, Index n, Index p) {
  const Matrix a = gaussian(rng, n, p);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, p);
}

/// 1/2 |y - X theta|^2 written directly in the expression language.
inline ObjectiveOracle ols_oracle(const Matrix& x, const Vector& y) {
  const Expr theta = Expr::parameter(x.cols());
  const Expr r = Expr::constant(y) - matvec(std::make_shared<const Matrix>(x), theta);
  return build_objective(0.5 * squared_norm(r), LossScale::HalfResidualSumOfSquares);
}

/// Independent OLS value and gradient, bypassing the tape.
inline ObjectiveOracle ols_oracle_analytic(const Matrix& x, const Vector& y) {
  return ObjectiveOracle::from_functions(
      x.cols(), [x, y](const Vector& t) { return 0.5 * (y - x * t).squaredNorm(); },
      [x, y](const Vector& t) -> Vector { return x.transpose() * (x * t - y); },
      LossScale::HalfResidualSumOfSquares);
}

/// Indices of the s largest |v|, ties to the lower index, sorted.
inline std::vector<Index> top_abs(const Vector& v, Index s) {
  std::vector<Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(v[a]) > std::abs(v[b]); });
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Least squares on the given columns, solved by QR; zero elsewhere.
inline Vector least_squares_on(const Matrix& x, const Vector& y, const std::vector<Index>& cols) {
  Vector theta = Vector::Zero(x.cols());
  if (cols.empty()) return theta;
  Matrix sub(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Index>(k)) = x.col(cols[k]);
  const Vector coef = sub.colPivHouseholderQr().solve(y);
  for (std::size_t k = 0; k < cols.size(); ++k) theta[cols[k]] = coef[static_cast<Index>(k)];
  return theta;
}

struct OlsInstance {
  Matrix x;
  Vector y;
};

/// Random Gaussian OLS instance with three planted coefficients plus noise.
inline OlsInstance random_ols(std::uint64_t seed, Index n = 50, Index p = 10) {
  std::mt19937_64 rng(seed);
  OlsInstance inst;
  inst.x = gaussian(rng, n, p);
  Vector theta = Vector::Zero(p);
  std::uniform_int_distribution<Index> pick(0, p - 1);
  for (int k = 0; k < 3; ++k) theta[pick(rng)] = 1.0 + 0.5 * k;
  inst.y = inst.x * theta + gaussian(rng, n);
  return inst;
}

inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / (1.0 + b.lpNorm<Eigen::Infinity>());
}

}  // namespace sco::testing
