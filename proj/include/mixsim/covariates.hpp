#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "mixsim/decay.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/stochastic_matrix.hpp"

namespace mixsim {

// Finite state space with labels 0..n-1.
struct StateSpace {
  int n = 0;
  explicit StateSpace(int n_ = 0) : n(n_) {}
  bool contains(int y) const { return y >= 0 && y < n; }
};

using Vec = std::vector<double>;

// Exogenous covariate process. iid marginals are either a finite atom law or
// a uniform box; finite_markov carries per-state covariate values; the AR(1)
// kind clips a stationary Gaussian AR(1) to [-clip, clip] coordinatewise
// (clipping keeps drives bounded, which several decay derivations assume).
struct CovariateProcessSpec {
  enum class Kind { iid_atoms, iid_uniform, finite_markov, gaussian_ar1_clipped };
  Kind kind = Kind::iid_atoms;

  // iid_atoms
  std::vector<Vec> atom_values;
  std::vector<double> atom_probs;
  // iid_uniform
  double lo = 0.0, hi = 1.0;
  int dim = 1;
  // finite_markov
  StochasticMatrix transition;
  std::vector<Vec> state_values;
  // gaussian_ar1_clipped (dim independent components)
  double phi = 0.0, sigma = 1.0, clip = 1.0;

  static CovariateProcessSpec iid_atoms_law(std::vector<Vec> values, std::vector<double> probs);
  static CovariateProcessSpec iid_uniform_box(double lo, double hi, int dim);
  static CovariateProcessSpec markov(StochasticMatrix transition, std::vector<Vec> values);
  static CovariateProcessSpec ar1_clipped(double phi, double sigma, double clip, int dim);

  int dimension() const;
  bool is_iid() const { return kind == Kind::iid_atoms || kind == Kind::iid_uniform; }
  void validate() const;
};

// Noise fed to the response maps. Vector draws are iid across coordinates
// and time. custom takes a quantile function applied per coordinate.
struct NoiseSpec {
  enum class Kind { uniform01, gaussian, gumbel, logistic, custom };
  Kind kind = Kind::uniform01;
  int dim = 1;
  std::function<double(double)> quantile;  // custom only

  static NoiseSpec uniform01();
  static NoiseSpec gaussian(int dim);
  static NoiseSpec gumbel(int dim);
  static NoiseSpec logistic();
  static NoiseSpec custom(std::function<double(double)> quantile, int dim);

  Vec draw(RngStream& rng) const;
  // CDF of one coordinate, used to recycle a noise coordinate as the
  // covariate innovation in sequential mode. Unavailable for custom.
  double to_uniform(double value) const;
  void validate() const;
};

// strict: covariates independent of all noise; sequential: the time-t
// covariate transition is innovated by eps_t (so X_t and eps_t are
// dependent) while eps_t stays independent of everything before t.
enum class ExogeneityMode { strict, sequential };

// Stationary environment materialized lazily in both time directions around
// the anchor t = 0 (X_0 stationary). Backward extension uses time reversal:
// iid directly, finite_markov via the reversed kernel, the AR(1) via
// reversibility of the stationary pre-clip process. Each time index owns an
// RNG substream, so values do not depend on materialization order.
class EnvironmentSequence {
 public:
  EnvironmentSequence(const CovariateProcessSpec& cov, const NoiseSpec& noise,
                      ExogeneityMode mode, RngStream base_stream);

  const Vec& covariate(std::int64_t t);
  int covariate_state(std::int64_t t);  // finite_markov state index; -1 otherwise
  const Vec& noise(std::int64_t t);
  ExogeneityMode mode() const { return mode_; }
  const CovariateProcessSpec& cov_spec() const { return cov_; }
  const NoiseSpec& noise_spec() const { return noise_; }

 private:
  struct Slot {
    Vec x;
    Vec pre_clip;  // ar1 only
    int state = -1;
    bool have_x = false;
    Vec eps;
    bool have_eps = false;
  };
  Slot& slot(std::int64_t t);
  void materialize_x(std::int64_t t);
  void materialize_eps(std::int64_t t);
  double innovation_uniform(std::int64_t t, RngStream& step_rng);
  void draw_iid(Slot& s, RngStream& step_rng, double shared_u, bool use_shared);

  CovariateProcessSpec cov_;
  NoiseSpec noise_;
  ExogeneityMode mode_;
  RngStream base_;
  std::vector<double> stat_;  // finite_markov stationary law
  StochasticMatrix reversed_;
  std::deque<Slot> slots_;  // index 0 holds time lo_
  std::int64_t lo_ = 0;
  std::int64_t hi_ = -1;  // inclusive; empty when hi_ < lo_
};

// Covariate path X_{t_begin..t_end} (inclusive) from the stationary law.
struct CovariatePath {
  std::int64_t t_begin = 0;
  std::vector<Vec> values;
  std::vector<int> states;  // finite_markov indices, -1 otherwise
  const Vec& at(std::int64_t t) const { return values[std::size_t(t - t_begin)]; }
  int state_at(std::int64_t t) const { return states[std::size_t(t - t_begin)]; }
};

CovariatePath gen_covariates(const CovariateProcessSpec& spec, std::int64_t t_begin,
                             std::int64_t t_end, RngStream stream);

// Strong mixing coefficients of the covariate process: identically zero for
// iid kinds; exact table plus certified geometric tail for finite_markov.
// gaussian_ar1_clipped has no closed form here and is rejected; pass a user
// supplied sequence to the bound calculators instead.
DecaySequence alpha_envelope(const CovariateProcessSpec& spec, int table_len = 32);

}  // namespace mixsim
