#include "mixsim/stochastic_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace mixsim {

StochasticMatrix::StochasticMatrix(int n) : n_(n), p_(std::size_t(n) * n, 0.0) {
  if (n <= 0) throw std::invalid_argument("StochasticMatrix: size must be positive");
}

StochasticMatrix StochasticMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("StochasticMatrix: empty");
  int n = int(rows.size());
  StochasticMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (int(rows[i].size()) != n)
      throw std::invalid_argument("StochasticMatrix: rows must form a square matrix");
    for (int j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
  }
  m.validate();
  return m;
}

StochasticMatrix StochasticMatrix::identity(int n) {
  StochasticMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

std::vector<double> StochasticMatrix::row(int i) const {
  return std::vector<double>(p_.begin() + std::size_t(i) * n_, p_.begin() + std::size_t(i + 1) * n_);
}

StochasticMatrix StochasticMatrix::multiply(const StochasticMatrix& rhs) const {
  if (n_ != rhs.n_) throw std::invalid_argument("StochasticMatrix: size mismatch");
  StochasticMatrix out(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      double pik = (*this)(i, k);
      if (pik == 0.0) continue;
      for (int j = 0; j < n_; ++j) out.at(i, j) += pik * rhs(k, j);
    }
  return out;
}

StochasticMatrix StochasticMatrix::power(int k) const {
  if (k < 0) throw std::invalid_argument("StochasticMatrix: negative power");
  StochasticMatrix acc = identity(n_);
  StochasticMatrix base = *this;
  while (k > 0) {
    if (k & 1) acc = acc.multiply(base);
    base = base.multiply(base);
    k >>= 1;
  }
  return acc;
}

std::vector<double> StochasticMatrix::stationary() const {
  // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  int n = n_;
  std::vector<double> a(std::size_t(n) * n), b(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[std::size_t(i) * n + j] = (*this)(j, i) - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < n; ++j) a[std::size_t(n - 1) * n + j] = 1.0;
  b[n - 1] = 1.0;

  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[std::size_t(r) * n + col]) > std::fabs(a[std::size_t(piv) * n + col])) piv = r;
    if (std::fabs(a[std::size_t(piv) * n + col]) < 1e-13)
      throw std::runtime_error("stationary: singular system (no unique stationary law)");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a[std::size_t(piv) * n + j], a[std::size_t(col) * n + j]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a[std::size_t(r) * n + col] / a[std::size_t(col) * n + col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a[std::size_t(r) * n + j] -= f * a[std::size_t(col) * n + j];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> pi(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= a[std::size_t(r) * n + j] * pi[j];
    pi[r] = s / a[std::size_t(r) * n + r];
  }
  double total = 0.0;
  for (double& v : pi) {
    if (v < 0 && v > -1e-12) v = 0;
    if (v < 0) throw std::runtime_error("stationary: negative mass in solution");
    total += v;
  }
  for (double& v : pi) v /= total;
  return pi;
}

double StochasticMatrix::dobrushin_coefficient() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      double s = 0.0;
      for (int k = 0; k < n_; ++k) s += std::fabs((*this)(i, k) - (*this)(j, k));
      worst = std::max(worst, 0.5 * s);
    }
  return worst;
}

void StochasticMatrix::validate(double tol) const {
  if (n_ <= 0) throw std::invalid_argument("StochasticMatrix: empty");
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      double v = (*this)(i, j);
      if (v < -tol) throw std::invalid_argument("StochasticMatrix: negative entry");
      if (v < 0) const_cast<StochasticMatrix*>(this)->at(i, j) = 0.0;
      s += (*this)(i, j);
    }
    if (std::fabs(s - 1.0) > tol)
      throw std::invalid_argument("StochasticMatrix: row does not sum to 1");
  }
}

double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu) {
  if (mu.size() != nu.size() || mu.empty())
    throw std::invalid_argument("tv_distance: length mismatch or empty");
  double half_l1 = 0.0, one_minus_overlap = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0 || nu[i] < 0) throw std::invalid_argument("tv_distance: negative mass");
    half_l1 += std::fabs(mu[i] - nu[i]);
    one_minus_overlap -= std::min(mu[i], nu[i]);
  }
  half_l1 *= 0.5;
  if (std::fabs(half_l1 - one_minus_overlap) > 1e-12)
    throw std::invalid_argument("tv_distance: inputs are not probability vectors");
  return half_l1;
}

}  // namespace mixsim
