#pragma once

#include <cstdint>
#include <vector>

#include "mixsim/decay.hpp"
#include "mixsim/stochastic_matrix.hpp"

namespace mixsim {

// Every series bound here evaluates an exact partial sum up to a cap and adds
// a certified closed-form remainder; calculators throw instead of silently
// truncating when they cannot certify the remainder.
struct BoundResult {
  double raw = 0.0;      // leading + series, before the universal cap
  double bound = 0.0;    // min(raw, 0.25); 1/4 bounds every mixing coefficient
  double leading = 0.0;  // term paid for conditioning on the driver up to r
  double series = 0.0;   // certified coupling series
  double tail_remainder = 0.0;  // part of series covered by closed-form envelopes
  int cap_used = 0;
};

// inf over j of rho^floor(s/j) + factor * alpha_kappa(j) / (1 - rho).
// factor 4 is what the covariance argument yields; factor 1 is also exposed
// so experiments can probe how much slack the 4 carries.
struct UltBound {
  double value = 0.0;
  int j = 0;
};
UltBound lemma_ult_bound(int s, double rho, const DecaySequence& alpha_kappa, int j_max = 0,
                         double factor = 4.0);

// Exact E[v(X_1) ... v(X_s)] for a stationary finite Markov chain: the
// reference value the product lemma is checked against.
double product_moment_markov(const StochasticMatrix& transition, const std::vector<double>& pi,
                             const std::vector<double>& v, int s);

// Closed form of the recursion bound
//   u_t <= C a^{max(t,0)/p} + sum_{j>=0} a^{j/p} v_{max(t-j,0)}
// for 0 <= a < 1, p >= 1; v[k] supplies v_k and must cover 0..max(t,0).
double lemma_ult3_bound(std::int64_t t, double C, double a, double p,
                        const std::vector<double>& v);

// Return-time mass of the renewal chain Q(i,i+1) = 1-b_i, Q(i,0) = b_i
// started at 0. Convention: out[0] = b_0; out[n] = P(T_n = 0) for n >= 1.
// b is indexed from 0 with values in [0,1].
std::vector<double> bstar_sequence(const DecaySequence& b, int len);

// bstar as a certified sequence: exact table 0..cap plus a geometric tail
// M * tau^n proved by a renewal-equation induction. Throws when no tau in
// (envelope ratio, 1) certifies, e.g. for non-summable b.
DecaySequence bstar_certified(const DecaySequence& b, int cap = 256);

// sum_{t >= r+d} x^{floor((t-r)/m)} for d >= 1, m >= 1, 0 <= x < 1
// (d = n - r; exact, used by the deterministic minorization variant).
double geometric_block_sum(std::int64_t d, int m, double x);

struct SeriesBoundOptions {
  int cap = 256;      // exact summation horizon in block index s
  int j_table = 32;   // small-j candidates tried at every s
  bool deterministic_eta = false;
  int lag_offset = -1;  // alpha argument (j-1)*m + off; -1 -> per-theorem default
};

// Blockwise minorization bound driven by the covariate mixing sequence:
//   4 alpha_x(r) + 2 sum_{t>=n} inf_j { rho^floor(s_t/j)
//                                       + 4 alpha_x((j-1)m + 1)/(1-rho) },
// s_t = floor((t-r)/m), rho = 1 - (minorization mass). deterministic_eta
// replaces the inf by rho^{s_t} with an exact closed form.
BoundResult thm1_bound(std::int64_t n, std::int64_t r, int m, double rho,
                       const DecaySequence& alpha_x, const SeriesBoundOptions& opts = {});

// Same series with innovation mixing alpha_zeta in place of alpha_x:
//   alpha_zeta(r+1) + 2 sum_{t>=n} inf_j { ... 4 alpha_zeta((j-1)m)/(1-rho) }.
BoundResult thm3_bound(std::int64_t n, std::int64_t r, int m, double rho,
                       const DecaySequence& alpha_zeta, const SeriesBoundOptions& opts = {});

struct Thm2Options {
  int cap = 256;
};

// Restart bound for contracting infinite-memory models: with S_t the tail
// sums of a and bstar from b,
//   4 alpha_x(r) + 2 sum_{t>=n-r-1} bstar_t + 4 xnorm sum_{t>=n-r} S_t
//                + 4 xnorm sum_{t>=n-r-1} (bstar conv S)_t.
BoundResult thm2_bound(std::int64_t n, std::int64_t r, const DecaySequence& a,
                       const DecaySequence& b, double x_norm, const DecaySequence& alpha_x,
                       const Thm2Options& opts = {});

// Restart functional
//   omega(s) = inf_p { abar^{s/p} + A_{p+1} + sum_{j=0}^{s+1} abar^{j/p} T_{s+1-j} }
// with abar = sum a, A_{p+1} its tail from p+1, T_u the tail of b from
// max(u,1). a and b are indexed from 1 and abar < 1 is required.
struct OmegaValue {
  double value = 0.0;
  int p = 0;
};
OmegaValue omega_value(std::int64_t s, const DecaySequence& a, const DecaySequence& b,
                       int p_max = 64);

struct CorOptions {
  int cap = 128;
  int p_max = 64;
  double exponent = 1.0;  // delta-to-mixing exponent; 1 for binary responses
  double scale = 1.0;     // calibrated multiplier in front of the series
};

// alpha_zeta(r+1) + scale * sum_{t>=n} omega(t-r)^exponent, with the omega
// tail certified through a four-term sqrt-geometric envelope.
BoundResult cor_mixing_bound(std::int64_t n, std::int64_t r, const DecaySequence& a,
                             const DecaySequence& b, const DecaySequence& alpha_zeta,
                             const CorOptions& opts = {});

// Block-length schedule matched to the covariate mixing tail: r = n/2 and
// j(s) = ceil(s^l) with l = 1/2 for geometric tails, (1+1/kappa)/2 for power
// tails. degenerate marks power exponents too close to 1 for a summable
// series ((kappa+1)/2 < 1.05).
struct RateSchedule {
  std::int64_t r = 0;
  double l = 0.5;
  bool degenerate = false;
};
RateSchedule rate_schedule(std::int64_t n, const DecaySequence& alpha_x);
std::int64_t schedule_j(std::int64_t s, double l);

}  // namespace mixsim
