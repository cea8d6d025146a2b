#include "mixsim/covariates.hpp"

#include <cmath>
#include <stdexcept>

#include "mixsim/mixing.hpp"
#include "mixsim/util.hpp"

namespace mixsim {

namespace {

int categorical_from_u(const std::vector<double>& probs, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return int(i);
  }
  return int(probs.size()) - 1;
}

std::uint64_t zigzag(std::int64_t t) {
  return t >= 0 ? std::uint64_t(t) * 2 : std::uint64_t(-(t + 1)) * 2 + 1;
}

}  // namespace

CovariateProcessSpec CovariateProcessSpec::iid_atoms_law(std::vector<Vec> values,
                                                         std::vector<double> probs) {
  CovariateProcessSpec s;
  s.kind = Kind::iid_atoms;
  s.atom_values = std::move(values);
  s.atom_probs = std::move(probs);
  s.validate();
  return s;
}

CovariateProcessSpec CovariateProcessSpec::iid_uniform_box(double lo, double hi, int dim) {
  CovariateProcessSpec s;
  s.kind = Kind::iid_uniform;
  s.lo = lo;
  s.hi = hi;
  s.dim = dim;
  s.validate();
  return s;
}

CovariateProcessSpec CovariateProcessSpec::markov(StochasticMatrix transition,
                                                  std::vector<Vec> values) {
  CovariateProcessSpec s;
  s.kind = Kind::finite_markov;
  s.transition = std::move(transition);
  s.state_values = std::move(values);
  s.validate();
  return s;
}

CovariateProcessSpec CovariateProcessSpec::ar1_clipped(double phi, double sigma, double clip,
                                                       int dim) {
  CovariateProcessSpec s;
  s.kind = Kind::gaussian_ar1_clipped;
  s.phi = phi;
  s.sigma = sigma;
  s.clip = clip;
  s.dim = dim;
  s.validate();
  return s;
}

int CovariateProcessSpec::dimension() const {
  switch (kind) {
    case Kind::iid_atoms:
      return atom_values.empty() ? 0 : int(atom_values[0].size());
    case Kind::iid_uniform:
    case Kind::gaussian_ar1_clipped:
      return dim;
    case Kind::finite_markov:
      return state_values.empty() ? 0 : int(state_values[0].size());
  }
  return 0;
}

void CovariateProcessSpec::validate() const {
  switch (kind) {
    case Kind::iid_atoms: {
      if (atom_values.empty() || atom_values.size() != atom_probs.size())
        throw std::invalid_argument("covariates: atom values/probs mismatch");
      std::size_t d = atom_values[0].size();
      if (d == 0) throw std::invalid_argument("covariates: empty atom value");
      double s = 0.0;
      for (double p : atom_probs) {
        if (p < 0) throw std::invalid_argument("covariates: negative atom probability");
        s += p;
      }
      if (std::fabs(s - 1.0) > 1e-9)
        throw std::invalid_argument("covariates: atom probabilities must sum to 1");
      for (const auto& v : atom_values)
        if (v.size() != d) throw std::invalid_argument("covariates: ragged atom values");
      break;
    }
    case Kind::iid_uniform:
      if (!(lo < hi)) throw std::invalid_argument("covariates: uniform box needs lo < hi");
      if (dim < 1) throw std::invalid_argument("covariates: dimension must be >= 1");
      break;
    case Kind::finite_markov: {
      transition.validate();
      if (int(state_values.size()) != transition.size())
        throw std::invalid_argument("covariates: one value vector per Markov state required");
      std::size_t d = state_values.empty() ? 0 : state_values[0].size();
      if (d == 0) throw std::invalid_argument("covariates: empty state value");
      for (const auto& v : state_values)
        if (v.size() != d) throw std::invalid_argument("covariates: ragged state values");
      break;
    }
    case Kind::gaussian_ar1_clipped:
      if (!(std::fabs(phi) < 1)) throw std::invalid_argument("covariates: |phi| must be < 1");
      if (!(sigma > 0)) throw std::invalid_argument("covariates: sigma must be positive");
      if (!(clip > 0)) throw std::invalid_argument("covariates: clip must be positive");
      if (dim < 1) throw std::invalid_argument("covariates: dimension must be >= 1");
      break;
  }
}

NoiseSpec NoiseSpec::uniform01() {
  NoiseSpec n;
  n.kind = Kind::uniform01;
  n.dim = 1;
  return n;
}

NoiseSpec NoiseSpec::gaussian(int dim) {
  NoiseSpec n;
  n.kind = Kind::gaussian;
  n.dim = dim;
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::gumbel(int dim) {
  NoiseSpec n;
  n.kind = Kind::gumbel;
  n.dim = dim;
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::logistic() {
  NoiseSpec n;
  n.kind = Kind::logistic;
  n.dim = 1;
  return n;
}

NoiseSpec NoiseSpec::custom(std::function<double(double)> quantile, int dim) {
  NoiseSpec n;
  n.kind = Kind::custom;
  n.quantile = std::move(quantile);
  n.dim = dim;
  n.validate();
  return n;
}

void NoiseSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("noise: dimension must be >= 1");
  if (kind == Kind::custom && !quantile) throw std::invalid_argument("noise: missing quantile");
}

Vec NoiseSpec::draw(RngStream& rng) const {
  Vec out((std::size_t(dim)));
  for (int i = 0; i < dim; ++i) {
    switch (kind) {
      case Kind::uniform01:
        out[std::size_t(i)] = rng.next_uniform();
        break;
      case Kind::gaussian:
        out[std::size_t(i)] = rng.next_gaussian();
        break;
      case Kind::gumbel:
        out[std::size_t(i)] = rng.next_gumbel();
        break;
      case Kind::logistic: {
        double u = rng.next_open_uniform();
        out[std::size_t(i)] = std::log(u / (1.0 - u));
        break;
      }
      case Kind::custom:
        out[std::size_t(i)] = quantile(rng.next_open_uniform());
        break;
    }
  }
  return out;
}

double NoiseSpec::to_uniform(double value) const {
  switch (kind) {
    case Kind::uniform01:
      return value < 0 ? 0 : (value > 1 ? 1 : value);
    case Kind::gaussian:
      return normal_cdf(value);
    case Kind::gumbel:
      return std::exp(-std::exp(-value));
    case Kind::logistic:
      return 1.0 / (1.0 + std::exp(-value));
    case Kind::custom:
      throw std::invalid_argument("noise: sequential mode is unsupported for custom noise");
  }
  return 0.0;
}

EnvironmentSequence::EnvironmentSequence(const CovariateProcessSpec& cov, const NoiseSpec& noise,
                                         ExogeneityMode mode, RngStream base_stream)
    : cov_(cov), noise_(noise), mode_(mode), base_(base_stream) {
  cov_.validate();
  noise_.validate();
  if (cov_.kind == CovariateProcessSpec::Kind::finite_markov) {
    stat_ = cov_.transition.stationary();
    int N = cov_.transition.size();
    StochasticMatrix rev(N);
    for (int i = 0; i < N; ++i) {
      if (stat_[std::size_t(i)] <= 0)
        throw std::invalid_argument("covariates: stationary law must charge every state");
      for (int j = 0; j < N; ++j)
        rev.at(i, j) = stat_[std::size_t(j)] * cov_.transition(j, i) / stat_[std::size_t(i)];
    }
    rev.validate(1e-7);
    reversed_ = rev;
  }
}

EnvironmentSequence::Slot& EnvironmentSequence::slot(std::int64_t t) {
  if (hi_ < lo_) {
    slots_.emplace_back();
    lo_ = hi_ = t;
  }
  while (t < lo_) {
    slots_.emplace_front();
    --lo_;
  }
  while (t > hi_) {
    slots_.emplace_back();
    ++hi_;
  }
  return slots_[std::size_t(t - lo_)];
}

const Vec& EnvironmentSequence::covariate(std::int64_t t) {
  materialize_x(t);
  return slot(t).x;
}

int EnvironmentSequence::covariate_state(std::int64_t t) {
  materialize_x(t);
  return slot(t).state;
}

const Vec& EnvironmentSequence::noise(std::int64_t t) {
  materialize_eps(t);
  return slot(t).eps;
}

double EnvironmentSequence::innovation_uniform(std::int64_t t, RngStream& step_rng) {
  if (mode_ == ExogeneityMode::strict) return step_rng.next_uniform();
  materialize_eps(t);
  return noise_.to_uniform(slot(t).eps[0]);
}

void EnvironmentSequence::draw_iid(Slot& s, RngStream& step_rng, double shared_u,
                                   bool use_shared) {
  if (cov_.kind == CovariateProcessSpec::Kind::iid_atoms) {
    double u = use_shared ? shared_u : step_rng.next_uniform();
    int idx = categorical_from_u(cov_.atom_probs, u);
    s.x = cov_.atom_values[std::size_t(idx)];
    s.state = idx;
  } else {
    s.x.resize(std::size_t(cov_.dim));
    for (int c = 0; c < cov_.dim; ++c) {
      double u = (use_shared && c == 0) ? shared_u : step_rng.next_uniform();
      s.x[std::size_t(c)] = cov_.lo + (cov_.hi - cov_.lo) * u;
    }
  }
  s.have_x = true;
}

void EnvironmentSequence::materialize_x(std::int64_t t) {
  if (slot(t).have_x) return;
  bool seq = mode_ == ExogeneityMode::sequential;
  if (seq && !cov_.is_iid() && t < 0)
    throw std::invalid_argument(
        "covariates: backward extension in sequential mode requires iid covariates");

  if (cov_.is_iid()) {
    Slot& s = slot(t);
    RngStream step = base_.substream(zigzag(t) * 2);
    double shared = seq ? innovation_uniform(t, step) : 0.0;
    draw_iid(s, step, shared, seq);
    return;
  }

  // anchor at time 0 from the stationary law
  if (!slot(0).have_x) {
    Slot& s0 = slot(0);
    RngStream step = base_.substream(zigzag(0) * 2);
    switch (cov_.kind) {
      case CovariateProcessSpec::Kind::finite_markov: {
        double u = innovation_uniform(0, step);
        int idx = categorical_from_u(stat_, u);
        s0.state = idx;
        s0.x = cov_.state_values[std::size_t(idx)];
        break;
      }
      case CovariateProcessSpec::Kind::gaussian_ar1_clipped: {
        double sd = cov_.sigma / std::sqrt(1.0 - cov_.phi * cov_.phi);
        s0.pre_clip.resize(std::size_t(cov_.dim));
        s0.x.resize(std::size_t(cov_.dim));
        for (int c = 0; c < cov_.dim; ++c) {
          double z = seq && c == 0 ? sd * normal_quantile(std::min(
                                              1.0 - 1e-16,
                                              std::max(1e-16, innovation_uniform(0, step))))
                                   : sd * step.next_gaussian();
          s0.pre_clip[std::size_t(c)] = z;
          s0.x[std::size_t(c)] = std::max(-cov_.clip, std::min(cov_.clip, z));
        }
        break;
      }
      default:
        break;
    }
    s0.have_x = true;
    if (t == 0) return;
  }

  if (t > 0) {
    std::int64_t s = t;
    while (s > 0 && !slot(s - 1).have_x) --s;
    for (; s <= t; ++s) {
      Slot& prev = slot(s - 1);
      Slot& cur = slot(s);
      RngStream step = base_.substream(zigzag(s) * 2);
      switch (cov_.kind) {
        case CovariateProcessSpec::Kind::finite_markov: {
          double u = innovation_uniform(s, step);
          int idx = categorical_from_u(cov_.transition.row(prev.state), u);
          cur.state = idx;
          cur.x = cov_.state_values[std::size_t(idx)];
          break;
        }
        case CovariateProcessSpec::Kind::gaussian_ar1_clipped: {
          cur.pre_clip.resize(std::size_t(cov_.dim));
          cur.x.resize(std::size_t(cov_.dim));
          for (int c = 0; c < cov_.dim; ++c) {
            double w = seq && c == 0
                           ? normal_quantile(std::min(1.0 - 1e-16,
                                                      std::max(1e-16, innovation_uniform(s, step))))
                           : step.next_gaussian();
            double z = cov_.phi * prev.pre_clip[std::size_t(c)] + cov_.sigma * w;
            cur.pre_clip[std::size_t(c)] = z;
            cur.x[std::size_t(c)] = std::max(-cov_.clip, std::min(cov_.clip, z));
          }
          break;
        }
        default:
          break;
      }
      cur.have_x = true;
    }
  } else {
    std::int64_t s = t;
    while (s < 0 && !slot(s + 1).have_x) ++s;
    for (; s >= t; --s) {
      Slot& next = slot(s + 1);
      Slot& cur = slot(s);
      RngStream step = base_.substream(zigzag(s) * 2);
      switch (cov_.kind) {
        case CovariateProcessSpec::Kind::finite_markov: {
          double u = step.next_uniform();
          int idx = categorical_from_u(reversed_.row(next.state), u);
          cur.state = idx;
          cur.x = cov_.state_values[std::size_t(idx)];
          break;
        }
        case CovariateProcessSpec::Kind::gaussian_ar1_clipped: {
          cur.pre_clip.resize(std::size_t(cov_.dim));
          cur.x.resize(std::size_t(cov_.dim));
          for (int c = 0; c < cov_.dim; ++c) {
            // stationary Gaussian AR(1) is time reversible
            double z = cov_.phi * next.pre_clip[std::size_t(c)] + cov_.sigma * step.next_gaussian();
            cur.pre_clip[std::size_t(c)] = z;
            cur.x[std::size_t(c)] = std::max(-cov_.clip, std::min(cov_.clip, z));
          }
          break;
        }
        default:
          break;
      }
      cur.have_x = true;
    }
  }
}

void EnvironmentSequence::materialize_eps(std::int64_t t) {
  Slot& s = slot(t);
  if (s.have_eps) return;
  RngStream step = base_.substream(zigzag(t) * 2 + 1);
  s.eps = noise_.draw(step);
  s.have_eps = true;
}

CovariatePath gen_covariates(const CovariateProcessSpec& spec, std::int64_t t_begin,
                             std::int64_t t_end, RngStream stream) {
  if (t_end < t_begin) throw std::invalid_argument("gen_covariates: empty range");
  EnvironmentSequence env(spec, NoiseSpec::uniform01(), ExogeneityMode::strict, stream);
  CovariatePath path;
  path.t_begin = t_begin;
  path.values.reserve(std::size_t(t_end - t_begin + 1));
  path.states.reserve(std::size_t(t_end - t_begin + 1));
  for (std::int64_t t = t_begin; t <= t_end; ++t) {
    path.values.push_back(env.covariate(t));
    path.states.push_back(env.covariate_state(t));
  }
  return path;
}

DecaySequence alpha_envelope(const CovariateProcessSpec& spec, int table_len) {
  spec.validate();
  switch (spec.kind) {
    case CovariateProcessSpec::Kind::iid_atoms:
    case CovariateProcessSpec::Kind::iid_uniform:
      return DecaySequence::zeros(0);
    case CovariateProcessSpec::Kind::finite_markov:
      return markov_alpha_envelope(spec.transition.stationary(), spec.transition, table_len);
    case CovariateProcessSpec::Kind::gaussian_ar1_clipped:
      throw std::invalid_argument(
          "alpha_envelope: no closed form for gaussian_ar1_clipped; supply a user sequence");
  }
  throw std::invalid_argument("alpha_envelope: unknown kind");
}

}  // namespace mixsim
