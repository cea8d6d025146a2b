#include <cmath>
#include <vector>

#include "doctest.h"
#include "mixsim/covariates.hpp"
#include "mixsim/doeblin.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/util.hpp"

using namespace mixsim;

TEST_CASE("doeblin_decompose splits a 2x2 kernel exactly") {
  StochasticMatrix P = StochasticMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  DoeblinParts dp = doeblin_decompose(P);
  CHECK(dp.eta == doctest::Approx(0.3).epsilon(1e-15));
  REQUIRE(dp.nu_defined);
  CHECK(dp.nu[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(dp.nu[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  REQUIRE(dp.residual_used);
  // the leftover kernel here is exactly the identity
  CHECK(dp.residual(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(dp.residual(0, 1)) <= 1e-14);
  CHECK(std::abs(dp.residual(1, 0)) <= 1e-14);
  CHECK(dp.residual(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(max_minorization_mass(P) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("doeblin_decompose edge cases") {
  // identical rows: the whole kernel is the minorizing law
  DoeblinParts one = doeblin_decompose(StochasticMatrix::from_rows({{0.3, 0.7}, {0.3, 0.7}}));
  CHECK(one.eta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(!one.residual_used);
  CHECK(one.nu[1] == doctest::Approx(0.7).epsilon(1e-15));

  // disjoint rows: nothing to share
  DoeblinParts zero = doeblin_decompose(StochasticMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(zero.eta == 0.0);
  CHECK(!zero.nu_defined);
  REQUIRE(zero.residual_used);
  CHECK(zero.residual(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("doeblin reconstruction holds on random kernels") {
  RngStream base = RngStream::make(17, 0);
  for (int k = 0; k < 20; ++k) {
    RngStream rng = base.substream(std::uint64_t(k));
    std::vector<std::vector<double>> rows(4, std::vector<double>(4));
    for (auto& row : rows) {
      double s = 0.0;
      for (auto& x : row) {
        x = rng.next_uniform();
        s += x;
      }
      for (auto& x : row) x /= s;
    }
    StochasticMatrix M = StochasticMatrix::from_rows(rows);
    DoeblinParts dp = doeblin_decompose(M);
    CHECK(dp.eta == doctest::Approx(max_minorization_mass(M)).epsilon(1e-15));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double recon = dp.eta * (dp.nu_defined ? dp.nu[std::size_t(j)] : 0.0) +
                       (dp.residual_used ? (1.0 - dp.eta) * dp.residual(i, j) : 0.0);
        CHECK(std::abs(M(i, j) - recon) <= 1e-14);
      }
  }
}

TEST_CASE("softmax_family evaluates logits row by row") {
  std::vector<std::vector<Vec>> theta = {{{1.0}, {0.0}}, {{0.0}, {0.0}}};
  KernelFamily fam = softmax_family(2, 1, theta);
  StochasticMatrix P = fam.at({std::log(3.0)});
  CHECK(P(0, 0) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(P(0, 1) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(P(1, 0) == doctest::Approx(0.5).epsilon(1e-14));

  // a support restriction zeroes the excluded columns
  KernelFamily restricted = softmax_family(2, 1, theta, {{0, 1}, {1}});
  StochasticMatrix Q = restricted.at({0.0});
  CHECK(Q(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Q(1, 0) == 0.0);

  CHECK(support_pattern_regular({{0, 1}, {0, 1}}, 2));
  CHECK(!support_pattern_regular({{0, 1}, {1}}, 2));
}

TEST_CASE("m-step products multiply in order") {
  StochasticMatrix M0 = StochasticMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  StochasticMatrix M1 = StochasticMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  KernelFamily fam;
  fam.space = StateSpace(2);
  fam.m = 2;
  fam.eval = [M0, M1](const Vec& x) { return x[0] < 0.5 ? M0 : M1; };
  StochasticMatrix prod = m_step_product(fam, {{0.0}, {1.0}});
  StochasticMatrix expect = M0.multiply(M1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(prod(i, j) == doctest::Approx(expect(i, j)).epsilon(1e-14));
}

TEST_CASE("bridge law on a two-step block") {
  StochasticMatrix M0 = StochasticMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  StochasticMatrix M1 = StochasticMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  KernelFamily fam;
  fam.space = StateSpace(2);
  fam.m = 2;
  fam.eval = [M0, M1](const Vec& x) { return x[0] < 0.5 ? M0 : M1; };

  BridgeDistribution br = bridge_law(fam, {{0.0}, {1.0}}, 0, 0);
  REQUIRE(br.paths.size() == 2);
  double p0 = -1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < br.paths.size(); ++k) {
    total += br.probs[k];
    if (br.paths[k][0] == 0) p0 = br.probs[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(p0 == doctest::Approx(0.9).epsilon(1e-13));

  // one-step blocks have a single empty interior path
  KernelFamily one;
  one.space = StateSpace(2);
  one.m = 1;
  one.eval = [M0](const Vec&) { return M0; };
  BridgeDistribution b1 = bridge_law(one, {{0.0}}, 0, 1);
  REQUIRE(b1.paths.size() == 1);
  CHECK(b1.paths[0].empty());
  CHECK(b1.probs[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bridge law matches pathwise products for a random family") {
  std::vector<std::vector<Vec>> theta(3, std::vector<Vec>(3));
  RngStream rng = RngStream::make(23, 0);
  for (auto& row : theta)
    for (auto& cell : row) cell = {rng.next_gaussian(), rng.next_gaussian()};
  KernelFamily fam = softmax_family(3, 3, theta);
  std::vector<Vec> z = {{0.3, -0.2}, {-1.0, 0.4}, {0.7, 0.1}};
  std::vector<StochasticMatrix> steps = {fam.at(z[0]), fam.at(z[1]), fam.at(z[2])};
  StochasticMatrix block = m_step_product(fam, z);

  for (int y0 = 0; y0 < 3; ++y0)
    for (int ym = 0; ym < 3; ++ym) {
      BridgeDistribution br = bridge_law(fam, z, y0, ym);
      REQUIRE(br.paths.size() == 9);
      double total = 0.0;
      for (std::size_t k = 0; k < br.paths.size(); ++k) {
        const auto& path = br.paths[k];
        double w = steps[0](y0, path[0]) * steps[1](path[0], path[1]) * steps[2](path[1], ym);
        CHECK(br.probs[k] * block(y0, ym) == doctest::Approx(w).epsilon(1e-11));
        total += br.probs[k];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-11));
    }
}

TEST_CASE("sample_bridge follows the conditional law") {
  StochasticMatrix M0 = StochasticMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  StochasticMatrix M1 = StochasticMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  RngStream rng = RngStream::make(29, 0);
  int zeros = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    std::vector<int> interior = sample_bridge({M0, M1}, 0, 0, rng);
    REQUIRE(interior.size() == 1);
    if (interior[0] == 0) ++zeros;
  }
  double f = double(zeros) / n;
  CHECK(std::abs(f - 0.9) < 4.0 * proportion_se(0.9, n));
}

TEST_CASE("eta_min_on_grid scans decompositions") {
  std::vector<std::vector<Vec>> theta = {{{1.0}, {0.0}}, {{0.0}, {0.0}}};
  KernelFamily fam = softmax_family(2, 1, theta);
  std::vector<Vec> grid = {{1.0}, {-1.0}};
  double direct = std::min(doeblin_decompose(fam.at({1.0})).eta,
                           doeblin_decompose(fam.at({-1.0})).eta);
  CHECK(eta_min_on_grid(fam, grid) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(direct > 0.7);  // weak logits keep the rows overlapping a lot
}

TEST_CASE("coupled restart chain keeps faithful marginals and merges") {
  std::vector<std::vector<Vec>> theta = {{{1.0}, {0.0}}, {{0.0}, {0.0}}};
  KernelFamily fam = softmax_family(2, 1, theta);
  CovariateProcessSpec cov = CovariateProcessSpec::iid_atoms_law({{1.0}, {-1.0}}, {0.5, 0.5});

  MreCouplingOptions opt;
  const int n_blocks = 3;
  const int reps = 20000;
  RngStream base = RngStream::make(31, 0);
  int last_ones = 0, merged = 0;
  for (int i = 0; i < reps; ++i) {
    CoupledPath cp = simulate_mre_coupled(fam, cov, 2, n_blocks, opt, base.substream(2 * i),
                                          base.substream(2 * i + 1));
    REQUIRE(cp.block_eta.size() == n_blocks);
    for (double e : cp.block_eta) {
      CHECK(e > 0.0);
      CHECK(e <= 1.0);
    }
    // after the first agreeing boundary the paths never split again
    bool agreed = false;
    for (int s = 1; s <= n_blocks; ++s) {
      bool dis = cp.disagree_at_boundary[std::size_t(s - 1)] != 0;
      if (agreed) CHECK(!dis);
      if (!dis) agreed = true;
      std::size_t t = std::size_t(cp.r) + std::size_t(s) * std::size_t(cp.m);
      CHECK((cp.y[t] == cp.y_prime[t - std::size_t(cp.r)]) == !dis);
    }
    if (cp.coalescence_block >= 0) ++merged;
    if (cp.y.back() == 1) ++last_ones;
  }
  // the covariate-averaged kernel has uniform rows here, so the chain's
  // marginal at any boundary is exactly 1/2
  double f = double(last_ones) / reps;
  CHECK(std::abs(f - 0.5) < 4.0 * proportion_se(0.5, reps));
  // eta_min is ~0.77, so non-merged paths after 3 blocks are rare but exist
  CHECK(merged > reps * 0.9);
}
