#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mixsim/covariates.hpp"
#include "mixsim/rng.hpp"

namespace mixsim {

// One realized random map on the p-lag embedded space E^p (E = {0..N-1}).
// Embedded states encode (y_1, ..., y_p), most recent first:
// index = y_1 + y_2 N + ... + y_p N^{p-1}. Applying the map shifts the
// history and installs the new value in front.
struct RandomMapRealization {
  int n_states = 0;
  int p = 1;
  std::vector<int> table;  // size N^p, entries are embedded indices
};

std::int64_t embedded_count(int n_states, int p);
int encode_history(const std::vector<int>& hist, int n_states);  // hist.size() == p
std::vector<int> decode_history(int code, int n_states, int p);
int embedded_front(int code, int n_states);  // y_1, the current value
int image_count(const std::vector<int>& table);

// Response model: the new value is a function of the last p values, the
// previous covariate, and fresh noise.
//  - multinomial: inverse-CDF draw from probs(y_hist, x); needs uniform01
//    noise and a strictly positive probability vector.
//  - ordinal: value i iff c_{i-1} < g(y_hist, x) + eps <= c_i with
//    c_0 = -inf, c_N = +inf (left-open, right-closed cells).
//  - multiple_choice: argmax_i { scores_i(y_hist, x) + eps_i }, ties to the
//    lowest index; noise dimension N.
struct MapModelSpec {
  enum class Kind { multinomial, ordinal, multiple_choice };
  Kind kind = Kind::multinomial;
  int n_states = 0;
  int p = 1;

  std::function<std::vector<double>(const std::vector<int>&, const Vec&)> probs;   // multinomial
  std::function<double(const std::vector<int>&, const Vec&)> g;                    // ordinal
  std::vector<double> thresholds;                                                  // ordinal, size N-1
  std::function<std::vector<double>(const std::vector<int>&, const Vec&)> scores;  // multiple_choice

  NoiseSpec noise;
  CovariateProcessSpec covariates;
  ExogeneityMode mode = ExogeneityMode::strict;

  void validate() const;
};

// New base-space value for one step.
int map_step_value(const MapModelSpec& spec, const std::vector<int>& y_hist, const Vec& x,
                   const Vec& eps);

RandomMapRealization realize_map(const MapModelSpec& spec, const Vec& x, const Vec& eps);

// Composition, earliest map first: compose({F_s, ..., F_t}) = F_t o ... o F_s.
RandomMapRealization compose(const std::vector<RandomMapRealization>& maps);

struct CoalescenceReport {
  int m = 0;
  std::int64_t replicates = 0;
  std::int64_t collapsed = 0;
  double rho_hat = 1.0;  // 1 - collapsed / replicates
  double se = 0.0;
};

// Probability that an m-step composed map fails to collapse to a single
// point, under the stationary environment. Disjoint substreams per
// replicate.
CoalescenceReport estimate_rho(const MapModelSpec& spec, int m, std::int64_t replicates,
                               RngStream base_stream);

struct BackwardSampleResult {
  bool coalesced = false;
  int embedded_state = -1;
  int value = -1;  // base-space value (front coordinate)
  int depth = 0;   // window length that achieved coalescence
};

// Perfect draw from the stationary law at time 0 by growing the window
// [-n+1, 0] in chunks until the composed map is constant. The environment is
// extended lazily into the past and reused as the window grows.
BackwardSampleResult backward_sample(const MapModelSpec& spec, int max_depth, int chunk,
                                     RngStream base_stream);

struct MapsCouplingOptions {
  int y_restart = 0;        // Y' restarts from the constant history (y,..,y)
  int backward_max_depth = 4096;
  int backward_chunk = 0;   // 0 means p
};

// Y is the stationary solution (backward-initialized at t = 0); Y' restarts
// at time r from a fixed history. Both follow the same realized maps from
// r+1 on, so disagreement can only shrink.
struct MapsCoupledPath {
  std::int64_t r = 0;
  std::vector<char> disagree_embedded;  // index s = t - r, t = r..horizon
  std::vector<char> disagree_value;     // front coordinates differ
  int init_depth = 0;
};

MapsCoupledPath simulate_maps_coupled(const MapModelSpec& spec, std::int64_t r,
                                      std::int64_t horizon, const MapsCouplingOptions& options,
                                      RngStream base_stream);

}  // namespace mixsim
