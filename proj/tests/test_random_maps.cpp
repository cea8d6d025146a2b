#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mixsim/random_maps.hpp"
#include "mixsim/util.hpp"

using namespace mixsim;

namespace {

MapModelSpec two_state_table(std::vector<double> row0, std::vector<double> row1) {
  MapModelSpec spec;
  spec.kind = MapModelSpec::Kind::multinomial;
  spec.n_states = 2;
  spec.p = 1;
  spec.probs = [row0, row1](const std::vector<int>& h, const Vec&) {
    return h[0] == 0 ? row0 : row1;
  };
  spec.noise = NoiseSpec::uniform01();
  spec.covariates = CovariateProcessSpec::iid_atoms_law({{0.0}}, {1.0});
  return spec;
}

}  // namespace

TEST_CASE("embedded history encoding") {
  CHECK(embedded_count(3, 3) == 27);
  CHECK(embedded_count(2, 10) == 1024);
  for (int code = 0; code < 27; ++code) {
    std::vector<int> h = decode_history(code, 3, 3);
    CHECK(int(h.size()) == 3);
    CHECK(encode_history(h, 3) == code);
    CHECK(embedded_front(code, 3) == h[0]);
    CHECK(h[0] == code % 3);
  }
  CHECK(encode_history({2, 0, 1}, 3) == 2 + 0 * 3 + 1 * 9);
  CHECK(image_count({0, 0, 1}) == 2);
  CHECK(image_count({2, 1, 0}) == 3);
}

TEST_CASE("multinomial step inverts the cdf") {
  MapModelSpec spec;
  spec.kind = MapModelSpec::Kind::multinomial;
  spec.n_states = 3;
  spec.p = 1;
  spec.probs = [](const std::vector<int>&, const Vec&) {
    return std::vector<double>{0.2, 0.3, 0.5};
  };
  spec.noise = NoiseSpec::uniform01();
  spec.covariates = CovariateProcessSpec::iid_atoms_law({{0.0}}, {1.0});
  spec.validate();
  Vec x = {0.0};
  CHECK(map_step_value(spec, {0}, x, {0.1}) == 0);
  CHECK(map_step_value(spec, {0}, x, {0.3}) == 1);
  CHECK(map_step_value(spec, {0}, x, {0.9}) == 2);
}

TEST_CASE("ordinal step uses left-open right-closed cells") {
  MapModelSpec spec;
  spec.kind = MapModelSpec::Kind::ordinal;
  spec.n_states = 3;
  spec.p = 1;
  spec.thresholds = {-0.4, 0.9};
  spec.g = [](const std::vector<int>&, const Vec&) { return 0.0; };
  spec.noise = NoiseSpec::logistic();
  spec.covariates = CovariateProcessSpec::iid_atoms_law({{0.0}}, {1.0});
  spec.validate();
  Vec x = {0.0};
  CHECK(map_step_value(spec, {0}, x, {-1.0}) == 0);
  CHECK(map_step_value(spec, {0}, x, {-0.4}) == 0);  // boundary belongs below
  CHECK(map_step_value(spec, {0}, x, {0.0}) == 1);
  CHECK(map_step_value(spec, {0}, x, {0.9}) == 1);
  CHECK(map_step_value(spec, {0}, x, {1.0}) == 2);
}

TEST_CASE("multiple choice takes the argmax with ties to the lowest index") {
  MapModelSpec spec;
  spec.kind = MapModelSpec::Kind::multiple_choice;
  spec.n_states = 3;
  spec.p = 1;
  spec.scores = [](const std::vector<int>&, const Vec&) {
    return std::vector<double>{1.0, 1.0, 0.0};
  };
  spec.noise = NoiseSpec::gumbel(3);
  spec.covariates = CovariateProcessSpec::iid_atoms_law({{0.0}}, {1.0});
  spec.validate();
  Vec x = {0.0};
  CHECK(map_step_value(spec, {0}, x, {0.0, 0.0, 0.0}) == 0);
  CHECK(map_step_value(spec, {0}, x, {0.0, 0.5, 2.0}) == 2);
}

TEST_CASE("model validation rejects mismatched noise") {
  MapModelSpec spec = two_state_table({0.9, 0.1}, {0.2, 0.8});
  spec.validate();
  spec.noise = NoiseSpec::gumbel(2);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.noise = NoiseSpec::uniform01();
  spec.n_states = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("realized maps tabulate the step function") {
  MapModelSpec spec = two_state_table({0.9, 0.1}, {0.2, 0.8});
  RandomMapRealization high = realize_map(spec, {0.0}, {0.95});
  CHECK(high.table == std::vector<int>{1, 1});
  CHECK(image_count(high.table) == 1);
  RandomMapRealization mid = realize_map(spec, {0.0}, {0.5});
  CHECK(mid.table == std::vector<int>{0, 1});
  CHECK(image_count(mid.table) == 2);
}

TEST_CASE("composition applies the earliest map first") {
  RandomMapRealization swap{2, 1, {1, 0}};
  RandomMapRealization konst{2, 1, {0, 0}};
  RandomMapRealization a = compose({konst, swap});  // swap after konst
  CHECK(a.table == std::vector<int>{1, 1});
  RandomMapRealization b = compose({swap, konst});  // konst after swap
  CHECK(b.table == std::vector<int>{0, 0});
  RandomMapRealization ident = compose({swap, swap});
  CHECK(ident.table == std::vector<int>{0, 1});
}

TEST_CASE("estimate_rho sees instant collapse for history-free models") {
  MapModelSpec spec = two_state_table({0.6, 0.4}, {0.6, 0.4});
  CoalescenceReport rep = estimate_rho(spec, 1, 500, RngStream::make(7, 0));
  CHECK(rep.collapsed == 500);
  CHECK(rep.rho_hat == 0.0);
  CHECK(rep.m == 1);
}

TEST_CASE("estimate_rho sees persistence for sticky models") {
  // strong positive feedback: the realized map is usually the identity
  MapModelSpec spec = two_state_table({0.99, 0.01}, {0.01, 0.99});
  CoalescenceReport rep = estimate_rho(spec, 1, 2000, RngStream::make(7, 1));
  CHECK(rep.rho_hat > 0.9);
  CHECK(rep.se > 0.0);
}

TEST_CASE("backward samples reproduce the stationary law of a fixed chain") {
  MapModelSpec spec = two_state_table({0.7, 0.3}, {0.3, 0.7});
  RngStream base = RngStream::make(13, 0);
  const int n = 20000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    BackwardSampleResult r = backward_sample(spec, 256, 1, base.substream(std::uint64_t(i)));
    REQUIRE(r.coalesced);
    CHECK(r.depth >= 1);
    CHECK(r.value == embedded_front(r.embedded_state, 2));
    if (r.value == 1) ++ones;
  }
  double f = double(ones) / n;
  CHECK(std::abs(f - 0.5) < 4.0 * proportion_se(0.5, n));
}

TEST_CASE("coupled map paths only shrink their disagreement") {
  MapModelSpec spec = two_state_table({0.8, 0.2}, {0.4, 0.6});
  MapsCouplingOptions opt;
  RngStream base = RngStream::make(19, 0);
  for (int i = 0; i < 200; ++i) {
    MapsCoupledPath cp = simulate_maps_coupled(spec, 3, 12, opt, base.substream(std::uint64_t(i)));
    REQUIRE(cp.disagree_embedded.size() == 10);
    REQUIRE(cp.disagree_value.size() == 10);
    bool merged = false;
    for (std::size_t s = 0; s < cp.disagree_embedded.size(); ++s) {
      if (merged) CHECK(cp.disagree_embedded[s] == 0);
      if (cp.disagree_embedded[s] == 0) merged = true;
      CHECK(cp.disagree_value[s] <= cp.disagree_embedded[s]);
    }
    CHECK(cp.init_depth >= 1);
  }
}
