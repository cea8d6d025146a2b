#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mixsim/decay.hpp"
#include "mixsim/stochastic_matrix.hpp"

using namespace mixsim;

TEST_CASE("from_rows validates shape and mass") {
  CHECK_THROWS_AS(StochasticMatrix::from_rows({{0.5, 0.4}, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(StochasticMatrix::from_rows({{1.2, -0.2}, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(StochasticMatrix::from_rows({{1.0}, {0.5, 0.5}}), std::invalid_argument);
  StochasticMatrix P = StochasticMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  CHECK(P.size() == 2);
  CHECK(P(0, 1) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("stationary law and dobrushin coefficient") {
  StochasticMatrix P = StochasticMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  std::vector<double> pi = P.stationary();
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(P.dobrushin_coefficient() == doctest::Approx(0.7).epsilon(1e-12));

  StochasticMatrix P2 = P.power(2);
  CHECK(P2(0, 0) == doctest::Approx(0.83).epsilon(1e-12));
  CHECK(P2(1, 0) == doctest::Approx(0.34).epsilon(1e-12));

  // identity has no unique stationary law
  CHECK_THROWS_AS(StochasticMatrix::identity(3).stationary(), std::exception);
}

TEST_CASE("tv_distance") {
  CHECK(tv_distance({0.9, 0.1}, {0.2, 0.8}) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(tv_distance({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK_THROWS(tv_distance({0.9, 0.2}, {0.5, 0.5}));  // not a probability vector
}

TEST_CASE("geometric decay sums are exact") {
  DecaySequence g = DecaySequence::geometric(0.5, 0.5, 1);
  CHECK(g.at(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.first_index() == 1);
  CHECK(g.tail_sum_from(1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(g.tail_sum_from(3) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(g.tail_sum_from(-5) == doctest::Approx(0.5).epsilon(1e-13));  // clamped to first_index
  // sum_{i>=1} i * 0.5^{i+1} = 1
  CHECK(g.weighted_tail_sum_from(1) == doctest::Approx(1.0).epsilon(1e-12));
  auto env = g.geometric_envelope();
  REQUIRE(env.has_value());
  for (int i = 1; i < 20; ++i) CHECK(g.at(i) <= env->coef * std::pow(env->ratio, i) + 1e-15);
}

TEST_CASE("table with hard end refuses to extrapolate") {
  DecaySequence t = DecaySequence::from_values({0.3, 0.2, 0.1}, Tail::none(), 1);
  CHECK(t.at(3) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(t.table_end() == 4);
  CHECK_THROWS(t.at(4));
  CHECK_THROWS(t.at(0));
  CHECK_THROWS(t.tail_sum_from(1));
  CHECK(!t.summable());

  DecaySequence z = DecaySequence::from_values({0.3, 0.2, 0.1}, Tail::zero(), 1);
  CHECK(z.at(10) == 0.0);
  CHECK(z.tail_sum_from(2) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(z.tail_sum_from(1) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("power tails give certified upper bounds") {
  DecaySequence p = DecaySequence::from_values({1.0}, Tail::power(1.0, 2.0), 1);
  double brute = 0.0;
  for (int i = 10; i < 2000000; ++i) brute += 1.0 / (double(i) * double(i));
  double bound = p.tail_sum_from(10);
  CHECK(bound >= brute - 1e-12);
  CHECK(bound <= brute + 2.0 * p.at(10) + 0.05 * brute);

  // weighted sums need exponent > 2
  DecaySequence q = DecaySequence::from_values({1.0}, Tail::power(1.0, 3.0), 1);
  double wbrute = 0.0;
  for (int i = 10; i < 2000000; ++i) wbrute += 1.0 / (double(i) * double(i));
  double wbound = q.weighted_tail_sum_from(10);
  CHECK(wbound >= wbrute - 1e-12);
  CHECK_THROWS(p.weighted_tail_sum_from(10));

  CHECK_THROWS(Tail::geometric(1.0, 1.0));   // ratio must be < 1
  CHECK_THROWS(Tail::power(1.0, 0.0));       // exponent must be positive
  DecaySequence ns = DecaySequence::from_values({0.5}, Tail::power(0.5, 0.9), 1);
  CHECK(!ns.summable());
  CHECK_THROWS(ns.tail_sum_from(1));
}

TEST_CASE("zeros sequence") {
  DecaySequence z = DecaySequence::zeros(0);
  CHECK(z.at(0) == 0.0);
  CHECK(z.at(1000) == 0.0);
  CHECK(z.tail_sum_from(0) == 0.0);
  CHECK(z.weighted_tail_sum_from(5) == 0.0);
}
