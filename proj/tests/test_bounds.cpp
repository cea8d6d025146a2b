#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mixsim/bounds.hpp"
#include "mixsim/rng.hpp"

using namespace mixsim;

TEST_CASE("blockwise product bound picks the best split") {
  DecaySequence alpha = DecaySequence::from_values({0.1, 0.01, 0.001}, Tail::zero(), 1);
  UltBound u1 = lemma_ult_bound(4, 0.5, alpha, 0, 1.0);
  // candidates: j=1 -> 0.5^4 + 0.2 = 0.2625, j=2 -> 0.27, j=3 -> 0.502
  CHECK(u1.value == doctest::Approx(0.2625).epsilon(1e-14));
  CHECK(u1.j == 1);
  UltBound u4 = lemma_ult_bound(4, 0.5, alpha);
  // with the factor 4: j=1 -> 0.8625, j=2 -> 0.33, j=3 -> 0.508
  CHECK(u4.value == doctest::Approx(0.33).epsilon(1e-14));
  CHECK(u4.j == 2);
  // restricting j keeps only the first candidate
  CHECK(lemma_ult_bound(4, 0.5, alpha, 1, 4.0).value == doctest::Approx(0.8625).epsilon(1e-14));
}

TEST_CASE("exact product moments match direct summation") {
  StochasticMatrix P = StochasticMatrix::from_rows({{0.7, 0.3}, {0.6, 0.4}});
  std::vector<double> pi = P.stationary();
  std::vector<double> v = {0.9, 0.2};
  const int s = 3;
  double brute = 0.0;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        brute += pi[std::size_t(x1)] * P(x1, x2) * P(x2, x3) * v[std::size_t(x1)] *
                 v[std::size_t(x2)] * v[std::size_t(x3)];
  CHECK(product_moment_markov(P, pi, v, s) == doctest::Approx(brute).epsilon(1e-13));
  CHECK(product_moment_markov(P, pi, v, 1) ==
        doctest::Approx(pi[0] * v[0] + pi[1] * v[1]).epsilon(1e-14));
}

TEST_CASE("recursion bound dominates the unrolled recursion") {
  const double a = 0.5, p = 2.0, C = 1.0;
  std::vector<double> v;
  for (int k = 0; k <= 40; ++k) v.push_back(0.3 * std::pow(0.8, k));
  std::vector<double> u(41);
  u[0] = C + v[0];
  const double step = std::pow(a, 1.0 / p);
  for (int t = 1; t <= 40; ++t) u[std::size_t(t)] = step * u[std::size_t(t - 1)] + v[std::size_t(t)];
  for (int t = 0; t <= 40; ++t) {
    double bound = lemma_ult3_bound(t, C, a, p, v);
    CHECK(u[std::size_t(t)] <= bound + 1e-12);
  }
}

TEST_CASE("renewal masses: constant case and exhaustive paths") {
  DecaySequence bc = DecaySequence::from_values(std::vector<double>(16, 0.4), Tail::none(), 0);
  std::vector<double> out = bstar_sequence(bc, 16);
  CHECK(out[0] == doctest::Approx(0.4).epsilon(1e-15));
  for (double x : out) CHECK(x == doctest::Approx(0.4).epsilon(1e-14));

  // brute force over all 2^n renewal paths of a short non-constant b
  DecaySequence b = DecaySequence::from_values({0.5, 0.3, 0.2, 0.1}, Tail::zero(), 0);
  const int n_max = 12;
  std::vector<double> ref(std::size_t(n_max) + 1, 0.0);
  ref[0] = b.at(0);
  for (int n = 1; n <= n_max; ++n) {
    double total = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double prob = 1.0;
      int state = 0;
      for (int t = 0; t < n; ++t) {
        double bi = b.at(state);
        if (mask >> t & 1) {
          prob *= bi;
          state = 0;
        } else {
          prob *= 1.0 - bi;
          ++state;
        }
      }
      if (state == 0) total += prob;
    }
    ref[std::size_t(n)] = total;
  }
  std::vector<double> got = bstar_sequence(b, n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    CHECK(got[std::size_t(n)] == doctest::Approx(ref[std::size_t(n)]).epsilon(1e-12));
}

TEST_CASE("certified renewal envelope dominates the exact sequence") {
  DecaySequence b = DecaySequence::geometric(0.3, 0.6, 0);
  DecaySequence env = bstar_certified(b, 32);
  std::vector<double> exact = bstar_sequence(b, 101);
  for (int n = 0; n <= 100; ++n) CHECK(env.at(n) >= exact[std::size_t(n)] - 1e-12);
  CHECK(env.summable());

  // a non-summable return law admits no geometric tail certificate
  DecaySequence bad = DecaySequence::from_values({0.4}, Tail::power(0.4, 0.5), 0);
  CHECK_THROWS(bstar_certified(bad, 32));
}

TEST_CASE("block geometric sums agree with direct accumulation") {
  struct Case {
    std::int64_t d;
    int m;
    double x;
  };
  for (Case c : {Case{1, 1, 0.5}, Case{3, 2, 0.3}, Case{5, 3, 0.7}, Case{2, 4, 0.9}}) {
    double brute = 0.0;
    for (std::int64_t t = c.d; t < c.d + 40000; ++t)
      brute += std::pow(c.x, double(t / c.m));
    CHECK(geometric_block_sum(c.d, c.m, c.x) == doctest::Approx(brute).epsilon(1e-9));
  }
  CHECK_THROWS(geometric_block_sum(0, 1, 0.5));
  CHECK_THROWS(geometric_block_sum(1, 1, 1.0));
}

TEST_CASE("series bound with a silent environment reduces to the block sum") {
  DecaySequence zero = DecaySequence::zeros(0);
  SeriesBoundOptions det;
  det.deterministic_eta = true;
  const std::int64_t n = 12, r = 5;
  const int m = 2;
  const double rho = 0.45;
  double closed = 2.0 * geometric_block_sum(n - r, m, rho);

  BoundResult a = thm1_bound(n, r, m, rho, zero, det);
  CHECK(a.leading == 0.0);
  CHECK(a.raw == doctest::Approx(closed).epsilon(1e-12));

  // the stochastic variant's inf over j reaches the same value at j = 1
  BoundResult b = thm1_bound(n, r, m, rho, zero);
  CHECK(b.raw >= closed - 1e-12);
  CHECK(b.raw - closed <= b.tail_remainder + 1e-12);

  BoundResult c = thm3_bound(n, r, m, rho, zero);
  CHECK(c.leading == 0.0);
  CHECK(c.raw >= closed - 1e-12);
  CHECK(c.raw - closed <= c.tail_remainder + 1e-12);
}

TEST_CASE("series bounds respect argument constraints and the universal cap") {
  DecaySequence alpha = DecaySequence::geometric(0.2, 0.5, 0);
  CHECK_THROWS(thm1_bound(5, 5, 1, 0.5, alpha));
  CHECK_THROWS(thm1_bound(5, -1, 1, 0.5, alpha));
  CHECK_THROWS(thm1_bound(4, 2, 1, 1.0, alpha));

  // a huge leading term still caps at 1/4
  DecaySequence big = DecaySequence::geometric(1.0, 0.99, 0);
  BoundResult r = thm1_bound(6, 2, 1, 0.9, big);
  CHECK(r.raw > 0.25);
  CHECK(r.bound == doctest::Approx(0.25).epsilon(1e-15));

  // larger n never increases the bound (same r)
  DecaySequence alpha2 = DecaySequence::geometric(0.05, 0.4, 0);
  double prev = 1e9;
  for (std::int64_t n = 6; n <= 30; n += 4) {
    BoundResult b = thm1_bound(n, 4, 2, 0.5, alpha2);
    CHECK(b.raw <= prev + 1e-14);
    prev = b.raw;
  }
}

TEST_CASE("restart series bound with no return mass") {
  DecaySequence a = DecaySequence::geometric(0.1, 0.5, 1);
  DecaySequence b = DecaySequence::zeros(0);
  DecaySequence alpha = DecaySequence::zeros(0);
  // only the middle term survives: 4 * xnorm * sum_{t>=n-r} S_t with
  // S_t = sum_{i>=t} a_i = 0.2 * 0.5^t, so the sum from 3 is 0.05
  BoundResult r = thm2_bound(8, 5, a, b, 2.0, alpha);
  double closed = 4.0 * 2.0 * 0.05;
  CHECK(r.raw >= closed - 1e-12);
  CHECK(r.raw - closed <= r.tail_remainder + 1e-12);
  CHECK(r.leading == 0.0);
}

TEST_CASE("restart functional hits its frozen value") {
  DecaySequence a = DecaySequence::from_values({0.5}, Tail::zero(), 1);
  DecaySequence b = DecaySequence::geometric(0.5, 0.5, 1);  // b_1 = 0.25, ratio 1/2
  OmegaValue w = omega_value(3, a, b);
  CHECK(w.value == doctest::Approx(0.40625).epsilon(1e-13));
  CHECK(w.p == 1);
  // a wider p search can only improve the infimum
  CHECK(omega_value(3, a, b, 64).value <= omega_value(3, a, b, 1).value + 1e-15);
  // omega decays in s
  CHECK(omega_value(12, a, b).value < omega_value(3, a, b).value);
}

TEST_CASE("corollary series scales linearly and decays in n") {
  DecaySequence a = DecaySequence::from_values({0.5}, Tail::zero(), 1);
  DecaySequence b = DecaySequence::geometric(0.5, 0.5, 1);
  DecaySequence az = DecaySequence::zeros(0);
  CorOptions one;
  CorOptions two;
  two.scale = 2.0;
  BoundResult r1 = cor_mixing_bound(10, 4, a, b, az, one);
  BoundResult r2 = cor_mixing_bound(10, 4, a, b, az, two);
  CHECK(r1.leading == 0.0);
  CHECK(r2.series == doctest::Approx(2.0 * r1.series).epsilon(1e-12));
  BoundResult r3 = cor_mixing_bound(16, 4, a, b, az, one);
  CHECK(r3.raw <= r1.raw + 1e-14);

  CorOptions frac;
  frac.exponent = 0.8;
  BoundResult r4 = cor_mixing_bound(10, 4, a, b, az, frac);
  CHECK(r4.raw > 0.0);
}

TEST_CASE("rate schedule tracks the mixing tail") {
  DecaySequence geo = DecaySequence::geometric(0.2, 0.5, 0);
  RateSchedule g = rate_schedule(7, geo);
  CHECK(g.r == 3);
  CHECK(g.l == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(!g.degenerate);

  DecaySequence pow3 = DecaySequence::from_values({0.2}, Tail::power(0.2, 3.0), 1);
  RateSchedule p = rate_schedule(20, pow3);
  CHECK(p.r == 10);
  CHECK(p.l == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(!p.degenerate);

  DecaySequence pow1 = DecaySequence::from_values({0.2}, Tail::power(0.2, 1.05), 1);
  CHECK(rate_schedule(20, pow1).degenerate);

  CHECK(schedule_j(1, 0.5) == 1);
  CHECK(schedule_j(2, 0.5) == 2);
  CHECK(schedule_j(9, 0.5) == 3);
  CHECK(schedule_j(10, 0.5) == 4);
}
