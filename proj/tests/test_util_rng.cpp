#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mixsim/rng.hpp"
#include "mixsim/util.hpp"

using namespace mixsim;

TEST_CASE("format_double round trips and stays short") {
  const double values[] = {0.25, 1.0 / 3.0, 1e-300, -7.5e22, 0.0, 123456789.0, 0.7};
  for (double v : values) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("fnv1a_hex matches the published test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("proportion_se at a half") {
  CHECK(proportion_se(0.5, 10000) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(proportion_se(0.0, 100) == 0.0);
}

TEST_CASE("normal cdf and quantile invert each other") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-9));
  for (double x : {-2.5, -0.3, 0.0, 0.7, 3.1})
    CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("running stat mean and se") {
  RunningStat st;
  for (double x : {1.0, 2.0, 3.0, 4.0}) st.add(x);
  CHECK(st.mean() == doctest::Approx(2.5).epsilon(1e-14));
  // sample sd of {1,2,3,4} is sqrt(5/3); se = sd / 2
  CHECK(st.se() == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("rng streams are reproducible and substreams detach") {
  RngStream a = RngStream::make(42, 7);
  RngStream b = RngStream::make(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c = RngStream::make(42, 8);
  RngStream d = RngStream::make(42, 7);
  bool all_same = true;
  for (int i = 0; i < 10; ++i) all_same = all_same && (c.next_u64() == d.next_u64());
  CHECK(!all_same);

  // substream values do not depend on how much the parent has been consumed
  RngStream p1 = RngStream::make(1, 2);
  RngStream p2 = RngStream::make(1, 2);
  p2.next_u64();
  p2.next_u64();
  RngStream s1 = p1.substream(5);
  RngStream s2 = p2.substream(5);
  for (int i = 0; i < 20; ++i) CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("uniform and categorical draws behave") {
  RngStream r = RngStream::make(3, 1);
  for (int i = 0; i < 1000; ++i) {
    double u = r.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double v = r.next_open_uniform();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  std::vector<double> probs = {0.2, 0.3, 0.5};
  std::vector<int> counts(3, 0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[std::size_t(r.next_categorical(probs))];
  for (int k = 0; k < 3; ++k) {
    double f = double(counts[std::size_t(k)]) / n;
    CHECK(std::abs(f - probs[std::size_t(k)]) < 4.0 * proportion_se(probs[std::size_t(k)], n));
  }
}

TEST_CASE("gaussian moments are sane") {
  RngStream r = RngStream::make(9, 4);
  RunningStat st;
  for (int i = 0; i < 20000; ++i) st.add(r.next_gaussian());
  CHECK(std::abs(st.mean()) < 4.0 * st.se());
  double var = st.sum_sq / double(st.n) - st.mean() * st.mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("parallel_for covers the range once and propagates exceptions") {
  const std::int64_t n = 10007;
  std::vector<int> hits(std::size_t(n), 0);
  parallel_for(n, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) ++hits[std::size_t(i)];
  });
  for (int h : hits) CHECK(h == 1);

  CHECK(thread_count() >= 1);
  CHECK_THROWS_AS(parallel_for(10,
                               [](std::int64_t, std::int64_t) {
                                 throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
