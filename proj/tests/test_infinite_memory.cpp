#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mixsim/infinite_memory.hpp"

using namespace mixsim;

namespace {

ContractionModelSpec binary_spec() {
  ContractionModelSpec spec;
  spec.kind = ContractionModelSpec::Kind::binary;
  spec.response = ContractionModelSpec::ResponseCdf::logistic;
  spec.beta = 0.5;
  spec.kappa = 0.3;
  spec.delta = {0.1};
  spec.covariates = CovariateProcessSpec::iid_uniform_box(0.0, 1.0, 1);
  return spec;
}

}  // namespace

TEST_CASE("contraction factors and depths") {
  ContractionModelSpec b = binary_spec();
  CHECK(b.response_slope() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(b.contraction_factor() == doctest::Approx(0.575).epsilon(1e-14));
  b.validate();

  ContractionModelSpec g = binary_spec();
  g.response = ContractionModelSpec::ResponseCdf::gaussian;
  CHECK(g.response_slope() == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-13));

  ContractionModelSpec ing;
  ing.kind = ContractionModelSpec::Kind::ingarch;
  ing.link = ContractionModelSpec::Link::identity;
  ing.beta = 0.3;
  ing.kappa = 0.4;
  ing.delta = {0.1};
  ing.covariates = CovariateProcessSpec::iid_uniform_box(0.0, 1.0, 1);
  CHECK(ing.response_slope() == 1.0);
  CHECK(ing.contraction_factor() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(ing.depth() == 78);  // ceil(ln 1e-12 / ln 0.7)
  ing.validate();

  // no contraction: |beta| + slope |kappa| >= 1
  ContractionModelSpec bad = ing;
  bad.beta = 0.8;
  bad.kappa = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // the identity link needs nonnegative feedback to stay a valid intensity
  ContractionModelSpec neg = ing;
  neg.kappa = -0.4;
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

TEST_CASE("influence decay is geometric from index one") {
  InfluenceDecay inf = influence_decay(binary_spec());
  CHECK(inf.a.first_index() == 1);
  CHECK(inf.a.at(1) == doctest::Approx(0.075).epsilon(1e-14));   // slope*|kappa|
  CHECK(inf.a.at(2) == doctest::Approx(0.0375).epsilon(1e-14));  // *|beta|
  CHECK(inf.b.at(1) == doctest::Approx(0.025).epsilon(1e-14));   // slope*|delta|_1
  CHECK(inf.a.tail_sum_from(1) == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("poisson inverse cdf") {
  CHECK(poisson_inv_cdf(1.0, 0.2) == 0);
  CHECK(poisson_inv_cdf(1.0, 0.5) == 1);
  CHECK(poisson_inv_cdf(1.0, 0.9) == 2);
  CHECK(poisson_inv_cdf(1.0, 1e-12) == 0);
  CHECK(poisson_inv_cdf(0.0, 0.99) == 0);
  CHECK(poisson_inv_cdf(20.0, 0.5) == 20);  // median of a Poisson(20)
}

TEST_CASE("poisson coupling distance equals the mean gap") {
  CHECK(poisson_coupling_distance(1.0, 2.5) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(poisson_coupling_distance(3.0, 3.0) == 0.0);
  CHECK(poisson_coupling_distance(0.2, 9.0) == doctest::Approx(8.8).epsilon(1e-10));
}

TEST_CASE("one contraction step, binary response") {
  ContractionModelSpec spec = binary_spec();
  // lambda = 0.5*0.4 + 0.3*1 + 0.1*2 = 0.7
  ContractionStepResult lo = contraction_step(spec, 0.4, 1.0, {2.0}, 0.2);
  CHECK(lo.lambda == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(lo.count == 0);
  CHECK(lo.value == 0.0);
  // 1 - F(0.7) = 1/(1+e^{0.7}) ~ 0.332; u = 0.5 clears it
  ContractionStepResult hi = contraction_step(spec, 0.4, 1.0, {2.0}, 0.5);
  CHECK(hi.count == 1);
  CHECK(hi.value == 1.0);
}

TEST_CASE("one contraction step, count responses") {
  ContractionModelSpec ing;
  ing.kind = ContractionModelSpec::Kind::ingarch;
  ing.link = ContractionModelSpec::Link::identity;
  ing.beta = 0.3;
  ing.kappa = 0.4;
  ing.delta = {0.1};
  ing.covariates = CovariateProcessSpec::iid_uniform_box(0.0, 1.0, 1);
  // lambda = 0.3*1 + 0.4*1 + 0.1*3 = 1.0
  ContractionStepResult r = contraction_step(ing, 1.0, 1.0, {3.0}, 0.5);
  CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.count == 1);
  CHECK(r.value == 1.0);

  ContractionModelSpec lg = ing;
  lg.link = ContractionModelSpec::Link::log;
  lg.kappa = 0.2;
  ContractionStepResult s = contraction_step(lg, 0.0, std::log(2.0), {0.0}, 0.5);
  // lambda = 0.2*log 2 ~ 0.1386; intensity e^lambda ~ 1.1487; median is 1
  CHECK(s.lambda == doctest::Approx(0.2 * std::log(2.0)).epsilon(1e-14));
  CHECK(s.count == 1);
  CHECK(s.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("restarted pairs agree exactly for binary values") {
  ContractionModelSpec spec = binary_spec();
  ContractionCoupledSummary sum =
      simulate_truncated_coupled(spec, 3, 9, 500, RngStream::make(37, 0));
  REQUIRE(sum.mean_delta.size() == 7);
  REQUIRE(sum.disagree.size() == 7);
  for (std::size_t s = 0; s < sum.mean_delta.size(); ++s) {
    CHECK(sum.mean_delta[s] >= 0.0);
    CHECK(sum.mean_delta[s] <= 1.0);
    // |Y - Y'| is 0/1 for binary responses, so the mean gap is the
    // disagreement frequency
    CHECK(sum.mean_delta[s] == doctest::Approx(sum.disagree[s]).epsilon(1e-14));
  }
  // the restart gap dies out under contraction
  CHECK(sum.mean_delta.back() < sum.mean_delta[1] + 0.05);
  CHECK(sum.replicates == 500);
}
