#pragma once

#include <vector>

namespace mixsim {

// Dense row-stochastic matrix over a finite state space. Rows are transition
// laws; the constructor validates row sums to 1 within 1e-9 and nonnegative
// entries (tiny negative noise from arithmetic is clamped to 0).
class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(int n);  // zero matrix, not yet stochastic
  static StochasticMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static StochasticMatrix identity(int n);

  int size() const { return n_; }
  double operator()(int i, int j) const { return p_[std::size_t(i) * n_ + j]; }
  double& at(int i, int j) { return p_[std::size_t(i) * n_ + j]; }
  const std::vector<double>& data() const { return p_; }
  std::vector<double> row(int i) const;

  StochasticMatrix multiply(const StochasticMatrix& rhs) const;
  StochasticMatrix power(int k) const;

  // Unique stationary distribution, by dense linear solve of pi P = pi with
  // sum(pi) = 1. Throws if the solve is singular (reducible/periodic chains
  // without a unique solution).
  std::vector<double> stationary() const;

  // Dobrushin contraction coefficient: max over row pairs of the total
  // variation distance between rows. Strictly below 1 iff the matrix is
  // scrambling.
  double dobrushin_coefficient() const;

  void validate(double tol = 1e-9) const;  // throws std::invalid_argument

 private:
  int n_ = 0;
  std::vector<double> p_;
};

// 0.5 * sum |mu - nu|, cross-checked against 1 - sum min(mu, nu); the two
// must agree to 1e-12 or the call throws (guards malformed inputs).
double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu);

}  // namespace mixsim
