#pragma once

#include <cstdint>
#include <vector>

#include "mixsim/decay.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/stochastic_matrix.hpp"

namespace mixsim {

// Joint law of a pair of finite-alphabet variables, row = first coordinate.
struct JointDistribution {
  int na = 0;
  int nb = 0;
  std::vector<double> p;  // row-major, na * nb

  static JointDistribution from_matrix(const std::vector<std::vector<double>>& rows);
  static JointDistribution from_counts(const std::vector<std::int64_t>& counts, int na, int nb);

  double mass(int a, int b) const { return p[std::size_t(a) * nb + b]; }
  std::vector<double> marginal_a() const;
  std::vector<double> marginal_b() const;
  JointDistribution transposed() const;
  void validate(double tol = 1e-9) const;
};

// max over events A x B of |P(A,B) - P(A)P(B)| by subset enumeration over
// the smaller alphabet (Gray-code updates). The larger side never needs
// enumeration: for fixed A the maximizing B collects the positive-part cells.
// Guard: the smaller alphabet must have at most 20 symbols.
double alpha_exact(const JointDistribution& joint);

// Dependence between X_0 and X_n for a stationary chain (pi, P): alpha_exact
// of the joint diag(pi) P^n. Requires pi stationary for P within 1e-10.
double alpha_markov_exact(const std::vector<double>& pi, const StochasticMatrix& P, int n);

// Exact table of alpha_markov_exact for lags 0..table_len-1 plus a certified
// geometric tail from the Dobrushin coefficient of the smallest scrambling
// power of P. The table is extended until the analytic envelope drops below
// the universal 1/4 so the sequence never exceeds it.
DecaySequence markov_alpha_envelope(const std::vector<double>& pi, const StochasticMatrix& P,
                                    int table_len);

struct AlphaEstimate {
  double value = 0.0;
  double se = 0.0;  // bootstrap standard error
};

// Plug-in alpha estimate from per-replicate (past window code, future window
// code) pairs, with a nonparametric bootstrap over replicates for the
// standard error. Codes must lie in [0, n_past) and [0, n_future).
AlphaEstimate alpha_empirical(const std::vector<int>& past_codes,
                              const std::vector<int>& future_codes, int n_past, int n_future,
                              int n_bootstrap, RngStream& rng);

}  // namespace mixsim
