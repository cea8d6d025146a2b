#pragma once

#include <cstdint>
#include <vector>

#include "mixsim/covariates.hpp"
#include "mixsim/decay.hpp"
#include "mixsim/rng.hpp"

namespace mixsim {

// Response model with a scalar linear state that contracts geometrically:
//   lambda_t = beta * lambda_{t-1} + kappa * value_{t-1} + delta . X_{t-1}
// binary:   Y_t = 1{ u_t > 1 - F(lambda_t) },          value = Y
// ingarch:  identity link: C_t ~ Poisson(lambda_t),    value = C
//           log link:      C_t ~ Poisson(exp lambda_t), value = log(1 + C)
// The response draw is the monotone inverse-CDF coupling in the shared
// uniform u_t, which is what makes restart experiments contract.
struct ContractionModelSpec {
  enum class Kind { binary, ingarch };
  enum class Link { identity, log };
  enum class ResponseCdf { logistic, gaussian };

  Kind kind = Kind::binary;
  Link link = Link::identity;           // ingarch only
  ResponseCdf response = ResponseCdf::logistic;  // binary only
  double beta = 0.0;
  double kappa = 0.0;
  Vec delta;
  CovariateProcessSpec covariates;
  ExogeneityMode mode = ExogeneityMode::strict;
  int truncation_depth = 0;  // 0 -> derived from the contraction factor

  // sup |F'| of the binary response CDF; 1 for count responses
  double response_slope() const;
  // |beta| + slope * |kappa|, required < 1
  double contraction_factor() const;
  int depth() const;
  void validate() const;
};

// Influence of the response i steps back (a) and of the covariate j steps
// back (b), both geometric in |beta| and indexed from 1.
struct InfluenceDecay {
  DecaySequence a;
  DecaySequence b;
};
InfluenceDecay influence_decay(const ContractionModelSpec& spec);

// Smallest k with P(Poisson(mean) <= k) >= u.
std::int64_t poisson_inv_cdf(double mean, double u);

// sum_k |P(Poisson(mu0) <= k) - P(Poisson(mu1) <= k)|. This is the expected
// absolute difference of the inverse-CDF coupling and equals |mu0 - mu1|.
double poisson_coupling_distance(double mu0, double mu1);

struct ContractionStepResult {
  double lambda = 0.0;
  std::int64_t count = 0;
  double value = 0.0;
};
ContractionStepResult contraction_step(const ContractionModelSpec& spec, double lambda_prev,
                                       double value_prev, const Vec& x_prev, double u);

struct ContractionCoupledSummary {
  std::int64_t r = 0;
  std::int64_t replicates = 0;
  // index s = 0..horizon-r: moments of |value_{r+s} - value'_{r+s}|
  std::vector<double> mean_delta;
  std::vector<double> se_delta;
  std::vector<double> disagree;  // fraction of replicates with a nonzero gap
};

// Y runs from zero state depth() steps before time 0 (so it is stationary to
// truncation accuracy by t = 0); Y' restarts at time r from zero state and
// shares all uniforms and covariates from r on.
ContractionCoupledSummary simulate_truncated_coupled(const ContractionModelSpec& spec,
                                                     std::int64_t r, std::int64_t horizon,
                                                     std::int64_t replicates,
                                                     RngStream base_stream);

}  // namespace mixsim
