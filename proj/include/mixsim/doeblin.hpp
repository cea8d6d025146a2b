#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mixsim/covariates.hpp"
#include "mixsim/rng.hpp"
#include "mixsim/stochastic_matrix.hpp"

namespace mixsim {

// Covariate-indexed family of one-step transition kernels on a finite state
// space, blocked in groups of m steps for the coupling construction.
struct KernelFamily {
  StateSpace space;
  int m = 1;
  std::function<StochasticMatrix(const Vec&)> eval;

  StochasticMatrix at(const Vec& x) const;  // evaluates and validates shape
  void validate() const;
};

// P_x(i,j) proportional to exp(theta[i][j] . x) over the support J_i
// (log-sum-exp stabilized). Empty supports vector means full support
// everywhere. theta is indexed [row][col][coordinate].
KernelFamily softmax_family(int n_states, int m,
                            const std::vector<std::vector<Vec>>& theta,
                            const std::vector<std::vector<int>>& supports = {});

// True iff some boolean power (up to n) of the support pattern is all ones,
// i.e. the chain can reach every state from every state regardless of the
// covariates' values.
bool support_pattern_regular(const std::vector<std::vector<int>>& supports, int n_states);

// pi = eta * nu + (1 - eta) * residual with the largest possible eta:
// eta = sum_y min_x pi(x, y).
struct DoeblinParts {
  double eta = 0.0;
  std::vector<double> nu;     // meaningful iff nu_defined
  StochasticMatrix residual;  // meaningful iff residual_used
  bool nu_defined = false;    // false iff eta == 0
  bool residual_used = true;  // false iff eta == 1 (identical rows)
};

DoeblinParts doeblin_decompose(const StochasticMatrix& pi);

// Largest eta admitting a minorization pi(x, .) >= eta * nu(.); equals the
// eta of doeblin_decompose. Exposed for feasibility tests.
double max_minorization_mass(const StochasticMatrix& pi);

// Product P_{z_1} ... P_{z_m} for a block of covariate values.
StochasticMatrix m_step_product(const KernelFamily& family, const std::vector<Vec>& z);

// Exact law of the interior states (y_1, ..., y_{m-1}) of an m-step block
// conditioned on its endpoints. m = 1 yields the single empty path.
struct BridgeDistribution {
  int m = 1;
  int n_states = 0;
  std::vector<std::vector<int>> paths;
  std::vector<double> probs;
};

BridgeDistribution bridge_law(const KernelFamily& family, const std::vector<Vec>& z, int y0,
                              int ym);

// One interior path draw by forward filtering / backward sampling under the
// given one-step kernels. Exact conditional law, linear in m.
std::vector<int> sample_bridge(const std::vector<StochasticMatrix>& steps, int y0, int ym,
                               RngStream& rng);

struct MreCouplingOptions {
  std::int64_t burn_in = -1;  // < 0 means the default 10 * n_states * m
  int y_init = 0;             // state at the start of the burn-in
  int y_restart = 0;          // Y' value at time r
  bool record_paths = true;   // keep full per-step paths (else boundaries only)
};

// One replicate of the block coupling: Y is the chain itself; Y' restarts
// from y_restart at time r and is driven through the minorization split
// block by block until the paths merge, after which they coincide.
struct CoupledPath {
  std::int64_t r = 0;
  int m = 1;
  int n_blocks = 0;
  std::vector<int> y;            // t = 0 .. r + n_blocks * m (when recorded)
  std::vector<int> y_prime;      // t = r .. r + n_blocks * m (when recorded)
  std::vector<double> block_eta;             // one per block
  std::vector<char> disagree_at_boundary;    // boundary s = 1 .. n_blocks
  std::int64_t coalescence_block = -1;       // first boundary with equality, -1 if none
};

CoupledPath simulate_mre_coupled(const KernelFamily& family, const CovariateProcessSpec& cov,
                                 std::int64_t r, int n_blocks, const MreCouplingOptions& options,
                                 RngStream env_stream, RngStream path_stream);

// Minimum over a covariate grid of the decomposition's eta. For families
// monotone in |x| a grid containing the extreme points is exact; the grid is
// the caller's statement of the covariate support.
double eta_min_on_grid(const KernelFamily& family, const std::vector<Vec>& grid);

}  // namespace mixsim
