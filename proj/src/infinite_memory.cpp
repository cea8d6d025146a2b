#include "mixsim/infinite_memory.hpp"

#include <cmath>
#include <stdexcept>

#include "mixsim/util.hpp"

namespace mixsim {

namespace {
constexpr double kMaxPoissonMean = 500.0;  // iterative pmf underflows far beyond this
constexpr int kMaxDepth = 4096;

double l1_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace

double ContractionModelSpec::response_slope() const {
  if (kind == Kind::ingarch) return 1.0;
  return response == ResponseCdf::logistic ? 0.25 : 1.0 / std::sqrt(2.0 * 3.14159265358979323846);
}

double ContractionModelSpec::contraction_factor() const {
  return std::fabs(beta) + response_slope() * std::fabs(kappa);
}

int ContractionModelSpec::depth() const {
  if (truncation_depth > 0) return truncation_depth;
  double gamma = contraction_factor();
  if (gamma <= 0.0) return 1;
  double d = std::ceil(std::log(1e-12) / std::log(gamma));
  if (!(d >= 1)) return 1;
  return d > kMaxDepth ? kMaxDepth : int(d);
}

void ContractionModelSpec::validate() const {
  covariates.validate();
  if (int(delta.size()) != covariates.dimension())
    throw std::invalid_argument("ContractionModelSpec: delta size must match covariate dimension");
  if (truncation_depth < 0)
    throw std::invalid_argument("ContractionModelSpec: truncation_depth must be >= 0");
  if (!(contraction_factor() < 1.0))
    throw std::invalid_argument(
        "ContractionModelSpec: need |beta| + slope*|kappa| < 1 for the state to contract");
  if (kind == Kind::ingarch && link == Link::identity) {
    if (beta < 0 || kappa < 0)
      throw std::invalid_argument("ContractionModelSpec: identity link needs beta, kappa >= 0");
    for (double d : delta)
      if (d < 0)
        throw std::invalid_argument("ContractionModelSpec: identity link needs delta >= 0");
    bool ok = true;
    switch (covariates.kind) {
      case CovariateProcessSpec::Kind::iid_atoms:
        for (const Vec& v : covariates.atom_values)
          for (double x : v) ok = ok && x >= 0;
        break;
      case CovariateProcessSpec::Kind::iid_uniform:
        ok = covariates.lo >= 0;
        break;
      case CovariateProcessSpec::Kind::finite_markov:
        for (const Vec& v : covariates.state_values)
          for (double x : v) ok = ok && x >= 0;
        break;
      case CovariateProcessSpec::Kind::gaussian_ar1_clipped:
        ok = false;
        break;
    }
    if (!ok)
      throw std::invalid_argument(
          "ContractionModelSpec: identity link needs nonnegative covariates");
  }
}

InfluenceDecay influence_decay(const ContractionModelSpec& spec) {
  spec.validate();
  double slope = spec.response_slope();
  double ab = std::fabs(spec.beta);
  double ca = slope * std::fabs(spec.kappa);
  double cb = slope * l1_norm(spec.delta);
  InfluenceDecay out;
  if (ab > 0) {
    out.a = DecaySequence::geometric(ca / ab, ab, 1);
    out.b = DecaySequence::geometric(cb / ab, ab, 1);
  } else {
    out.a = DecaySequence::from_values({ca}, Tail::zero(), 1);
    out.b = DecaySequence::from_values({cb}, Tail::zero(), 1);
  }
  return out;
}

std::int64_t poisson_inv_cdf(double mean, double u) {
  if (!(mean >= 0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_inv_cdf: mean must be finite and >= 0");
  if (mean > kMaxPoissonMean)
    throw std::invalid_argument("poisson_inv_cdf: mean too large; the model is unstable");
  if (!(u >= 0) || !(u < 1)) throw std::invalid_argument("poisson_inv_cdf: u must be in [0,1)");
  double p = std::exp(-mean);
  double cum = p;
  std::int64_t k = 0;
  while (u > cum) {
    ++k;
    p *= mean / double(k);
    cum += p;
    if (p == 0.0) break;  // cdf saturated in floating point
  }
  return k;
}

double poisson_coupling_distance(double mu0, double mu1) {
  if (!(mu0 >= 0) || !(mu1 >= 0) || mu0 > kMaxPoissonMean || mu1 > kMaxPoissonMean)
    throw std::invalid_argument("poisson_coupling_distance: means must be in [0, 500]");
  double p0 = std::exp(-mu0), p1 = std::exp(-mu1);
  double c0 = p0, c1 = p1;
  double sum = std::fabs(c0 - c1);
  std::int64_t k = 0;
  while (c0 < 1.0 - 1e-14 || c1 < 1.0 - 1e-14) {
    ++k;
    p0 *= mu0 / double(k);
    p1 *= mu1 / double(k);
    c0 += p0;
    c1 += p1;
    sum += std::fabs(c0 - c1);
    if (p0 == 0.0 && p1 == 0.0) break;
  }
  return sum;
}

ContractionStepResult contraction_step(const ContractionModelSpec& spec, double lambda_prev,
                                       double value_prev, const Vec& x_prev, double u) {
  ContractionStepResult out;
  out.lambda = spec.beta * lambda_prev + spec.kappa * value_prev + dot(spec.delta, x_prev);
  if (spec.kind == ContractionModelSpec::Kind::binary) {
    double f = spec.response == ContractionModelSpec::ResponseCdf::logistic
                   ? 1.0 / (1.0 + std::exp(-out.lambda))
                   : normal_cdf(out.lambda);
    out.count = u > 1.0 - f ? 1 : 0;
    out.value = double(out.count);
  } else {
    double mean = spec.link == ContractionModelSpec::Link::identity ? out.lambda
                                                                    : std::exp(out.lambda);
    out.count = poisson_inv_cdf(mean, u);
    out.value = spec.link == ContractionModelSpec::Link::identity ? double(out.count)
                                                                  : std::log1p(double(out.count));
  }
  return out;
}

ContractionCoupledSummary simulate_truncated_coupled(const ContractionModelSpec& spec,
                                                     std::int64_t r, std::int64_t horizon,
                                                     std::int64_t replicates,
                                                     RngStream base_stream) {
  spec.validate();
  if (r < 0 || horizon < r)
    throw std::invalid_argument("simulate_truncated_coupled: need 0 <= r <= horizon");
  if (replicates < 1) throw std::invalid_argument("simulate_truncated_coupled: need replicates");
  std::size_t n_lags = std::size_t(horizon - r + 1);
  std::vector<double> deltas(std::size_t(replicates) * n_lags);
  int depth = spec.depth();

  parallel_for(replicates, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      EnvironmentSequence env(spec.covariates, NoiseSpec::uniform01(), spec.mode,
                              base_stream.substream(std::uint64_t(rep)));
      double lam = 0.0, val = 0.0;
      for (std::int64_t t = -std::int64_t(depth) + 1; t <= r; ++t) {
        auto s = contraction_step(spec, lam, val, env.covariate(t - 1), env.noise(t)[0]);
        lam = s.lambda;
        val = s.value;
      }
      double* row = deltas.data() + std::size_t(rep) * n_lags;
      double lam_p = 0.0, val_p = 0.0;  // restart: zero state at r
      row[0] = std::fabs(val - val_p);
      for (std::int64_t t = r + 1; t <= horizon; ++t) {
        const Vec& x = env.covariate(t - 1);
        double u = env.noise(t)[0];
        auto s = contraction_step(spec, lam, val, x, u);
        auto sp = contraction_step(spec, lam_p, val_p, x, u);
        lam = s.lambda;
        val = s.value;
        lam_p = sp.lambda;
        val_p = sp.value;
        row[std::size_t(t - r)] = std::fabs(val - val_p);
      }
    }
  });

  ContractionCoupledSummary out;
  out.r = r;
  out.replicates = replicates;
  out.mean_delta.resize(n_lags);
  out.se_delta.resize(n_lags);
  out.disagree.resize(n_lags);
  for (std::size_t s = 0; s < n_lags; ++s) {
    RunningStat stat;
    std::int64_t nonzero = 0;
    for (std::int64_t rep = 0; rep < replicates; ++rep) {
      double d = deltas[std::size_t(rep) * n_lags + s];
      stat.add(d);
      if (d > 0.0) ++nonzero;
    }
    out.mean_delta[s] = stat.mean();
    out.se_delta[s] = stat.se();
    out.disagree[s] = double(nonzero) / double(replicates);
  }
  return out;
}

}  // namespace mixsim
