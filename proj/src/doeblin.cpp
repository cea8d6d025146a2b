#include "mixsim/doeblin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixsim {

StochasticMatrix KernelFamily::at(const Vec& x) const {
  if (!eval) throw std::invalid_argument("KernelFamily: missing evaluator");
  StochasticMatrix p = eval(x);
  if (p.size() != space.n) throw std::invalid_argument("KernelFamily: evaluator size mismatch");
  return p;
}

void KernelFamily::validate() const {
  if (space.n < 2) throw std::invalid_argument("KernelFamily: need at least 2 states");
  if (m < 1) throw std::invalid_argument("KernelFamily: block length must be >= 1");
  if (!eval) throw std::invalid_argument("KernelFamily: missing evaluator");
}

KernelFamily softmax_family(int n_states, int m, const std::vector<std::vector<Vec>>& theta,
                            const std::vector<std::vector<int>>& supports) {
  if (n_states < 2) throw std::invalid_argument("softmax_family: need at least 2 states");
  if (int(theta.size()) != n_states)
    throw std::invalid_argument("softmax_family: one parameter row per state required");
  std::size_t d = 0;
  for (const auto& row : theta) {
    if (int(row.size()) != n_states)
      throw std::invalid_argument("softmax_family: theta must be n x n vectors");
    for (const auto& v : row) {
      if (d == 0) d = v.size();
      if (v.size() != d || d == 0)
        throw std::invalid_argument("softmax_family: ragged or empty parameter vectors");
    }
  }
  std::vector<std::vector<int>> supp = supports;
  if (supp.empty()) {
    supp.assign(std::size_t(n_states), {});
    for (auto& s : supp) {
      s.resize(std::size_t(n_states));
      for (int j = 0; j < n_states; ++j) s[std::size_t(j)] = j;
    }
  }
  if (int(supp.size()) != n_states)
    throw std::invalid_argument("softmax_family: one support per state required");
  for (const auto& s : supp) {
    if (s.empty()) throw std::invalid_argument("softmax_family: empty support row");
    for (int j : s)
      if (j < 0 || j >= n_states) throw std::invalid_argument("softmax_family: support out of range");
  }

  KernelFamily fam;
  fam.space = StateSpace(n_states);
  fam.m = m;
  fam.eval = [n_states, d, theta, supp](const Vec& x) {
    if (x.size() != d) throw std::invalid_argument("softmax_family: covariate dimension mismatch");
    StochasticMatrix p(n_states);
    for (int i = 0; i < n_states; ++i) {
      const auto& row_supp = supp[std::size_t(i)];
      double best = -1e300;
      for (int j : row_supp) {
        double dot = 0.0;
        for (std::size_t c = 0; c < d; ++c) dot += theta[std::size_t(i)][std::size_t(j)][c] * x[c];
        best = std::max(best, dot);
      }
      double z = 0.0;
      std::vector<double> w(row_supp.size());
      for (std::size_t k = 0; k < row_supp.size(); ++k) {
        int j = row_supp[k];
        double dot = 0.0;
        for (std::size_t c = 0; c < d; ++c) dot += theta[std::size_t(i)][std::size_t(j)][c] * x[c];
        w[k] = std::exp(dot - best);
        z += w[k];
      }
      for (std::size_t k = 0; k < row_supp.size(); ++k) p.at(i, row_supp[k]) = w[k] / z;
    }
    return p;
  };
  return fam;
}

bool support_pattern_regular(const std::vector<std::vector<int>>& supports, int n_states) {
  if (int(supports.size()) != n_states) return false;
  std::vector<std::vector<char>> reach(std::size_t(n_states),
                                       std::vector<char>(std::size_t(n_states), 0));
  for (int i = 0; i < n_states; ++i)
    for (int j : supports[std::size_t(i)]) reach[std::size_t(i)][std::size_t(j)] = 1;
  auto all_ones = [&]() {
    for (const auto& row : reach)
      for (char c : row)
        if (!c) return false;
    return true;
  };
  for (int k = 1; k <= n_states; ++k) {
    if (all_ones()) return true;
    std::vector<std::vector<char>> next(std::size_t(n_states),
                                        std::vector<char>(std::size_t(n_states), 0));
    for (int i = 0; i < n_states; ++i)
      for (int l = 0; l < n_states; ++l)
        if (reach[std::size_t(i)][std::size_t(l)])
          for (int j = 0; j < n_states; ++j)
            if (reach[std::size_t(l)][std::size_t(j)]) next[std::size_t(i)][std::size_t(j)] = 1;
    reach = std::move(next);
  }
  return all_ones();
}

double max_minorization_mass(const StochasticMatrix& pi) {
  int n = pi.size();
  double eta = 0.0;
  for (int j = 0; j < n; ++j) {
    double mn = pi(0, j);
    for (int i = 1; i < n; ++i) mn = std::min(mn, pi(i, j));
    eta += mn;
  }
  return eta;
}

DoeblinParts doeblin_decompose(const StochasticMatrix& pi) {
  pi.validate();
  int n = pi.size();
  DoeblinParts parts;
  std::vector<double> colmin((std::size_t(n)));
  double eta = 0.0;
  for (int j = 0; j < n; ++j) {
    double mn = pi(0, j);
    for (int i = 1; i < n; ++i) mn = std::min(mn, pi(i, j));
    colmin[std::size_t(j)] = mn;
    eta += mn;
  }
  parts.eta = eta;
  if (eta == 0.0) {
    parts.nu_defined = false;
    parts.residual = pi;  // (pi - 0) / 1
    parts.residual_used = true;
    return parts;
  }
  parts.nu_defined = true;
  parts.nu.resize(std::size_t(n));
  for (int j = 0; j < n; ++j) parts.nu[std::size_t(j)] = colmin[std::size_t(j)] / eta;

  if (eta >= 1.0 - 1e-13) {
    // identical rows: the residual carries no mass and must never be read
    parts.eta = 1.0;
    parts.residual_used = false;
    parts.residual = StochasticMatrix::identity(n);
    return parts;
  }
  StochasticMatrix res(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = (pi(i, j) - eta * parts.nu[std::size_t(j)]) / (1.0 - eta);
      if (v < 0 && v > -1e-9) v = 0;
      res.at(i, j) = v;
    }
  res.validate(1e-7);
  parts.residual = res;
  parts.residual_used = true;
  return parts;
}

StochasticMatrix m_step_product(const KernelFamily& family, const std::vector<Vec>& z) {
  family.validate();
  if (int(z.size()) != family.m)
    throw std::invalid_argument("m_step_product: need exactly m covariate values");
  StochasticMatrix p = family.at(z[0]);
  for (int k = 1; k < family.m; ++k) p = p.multiply(family.at(z[std::size_t(k)]));
  return p;
}

BridgeDistribution bridge_law(const KernelFamily& family, const std::vector<Vec>& z, int y0,
                              int ym) {
  family.validate();
  if (int(z.size()) != family.m)
    throw std::invalid_argument("bridge_law: need exactly m covariate values");
  int n = family.space.n, m = family.m;
  if (!family.space.contains(y0) || !family.space.contains(ym))
    throw std::invalid_argument("bridge_law: endpoint out of range");

  BridgeDistribution out;
  out.m = m;
  out.n_states = n;
  if (m == 1) {
    out.paths = {{}};
    out.probs = {1.0};
    return out;
  }
  double interior = std::pow(double(n), m - 1);
  if (interior > 1e6) throw std::invalid_argument("bridge_law: interior path space too large");

  std::vector<StochasticMatrix> steps;
  steps.reserve(std::size_t(m));
  for (const auto& x : z) steps.push_back(family.at(x));

  StochasticMatrix total = steps[0];
  for (int k = 1; k < m; ++k) total = total.multiply(steps[std::size_t(k)]);
  double denom = total(y0, ym);
  if (denom <= 0) throw std::invalid_argument("bridge_law: endpoint pair has zero probability");

  std::vector<int> path(std::size_t(m - 1), 0);
  std::int64_t count = std::int64_t(interior + 0.5);
  out.paths.reserve(std::size_t(count));
  out.probs.reserve(std::size_t(count));
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::int64_t rem = idx;
    for (int k = 0; k < m - 1; ++k) {
      path[std::size_t(k)] = int(rem % n);
      rem /= n;
    }
    double w = steps[0](y0, path[0]);
    for (int k = 1; k < m - 1; ++k) w *= steps[std::size_t(k)](path[std::size_t(k - 1)], path[std::size_t(k)]);
    w *= steps[std::size_t(m - 1)](path[std::size_t(m - 2)], ym);
    out.paths.push_back(path);
    out.probs.push_back(w / denom);
  }
  return out;
}

std::vector<int> sample_bridge(const std::vector<StochasticMatrix>& steps, int y0, int ym,
                               RngStream& rng) {
  int m = int(steps.size());
  if (m < 1) throw std::invalid_argument("sample_bridge: empty kernel list");
  if (m == 1) return {};
  int n = steps[0].size();

  // forward filters f_k = law of Y_k given Y_0 = y0, k = 1..m-1
  std::vector<std::vector<double>> f(std::size_t(m - 1), std::vector<double>(std::size_t(n), 0.0));
  {
    std::vector<double> cur(std::size_t(n), 0.0);
    cur[std::size_t(y0)] = 1.0;
    for (int k = 1; k <= m - 1; ++k) {
      std::vector<double> nxt(std::size_t(n), 0.0);
      for (int i = 0; i < n; ++i) {
        if (cur[std::size_t(i)] == 0.0) continue;
        for (int j = 0; j < n; ++j) nxt[std::size_t(j)] += cur[std::size_t(i)] * steps[std::size_t(k - 1)](i, j);
      }
      f[std::size_t(k - 1)] = nxt;
      cur = std::move(nxt);
    }
  }
  std::vector<int> path(std::size_t(m - 1));
  int next_state = ym;
  for (int k = m - 1; k >= 1; --k) {
    std::vector<double> w((std::size_t(n)));
    double z = 0.0;
    for (int v = 0; v < n; ++v) {
      double val = f[std::size_t(k - 1)][std::size_t(v)] * steps[std::size_t(k)](v, next_state);
      w[std::size_t(v)] = val;
      z += val;
    }
    if (z <= 0) throw std::runtime_error("sample_bridge: conditioning event has zero probability");
    for (double& val : w) val /= z;
    int v = rng.next_categorical(w);
    path[std::size_t(k - 1)] = v;
    next_state = v;
  }
  return path;
}

CoupledPath simulate_mre_coupled(const KernelFamily& family, const CovariateProcessSpec& cov,
                                 std::int64_t r, int n_blocks, const MreCouplingOptions& options,
                                 RngStream env_stream, RngStream path_stream) {
  family.validate();
  cov.validate();
  if (r < 0) throw std::invalid_argument("simulate_mre_coupled: r must be >= 0");
  if (n_blocks < 1) throw std::invalid_argument("simulate_mre_coupled: need at least one block");
  int N = family.space.n, m = family.m;
  if (!family.space.contains(options.y_init) || !family.space.contains(options.y_restart))
    throw std::invalid_argument("simulate_mre_coupled: start state out of range");

  std::int64_t burn = options.burn_in >= 0 ? options.burn_in : std::int64_t(10) * N * m;
  std::int64_t t_end = r + std::int64_t(n_blocks) * m;

  EnvironmentSequence env(cov, NoiseSpec::uniform01(), ExogeneityMode::strict, env_stream);

  CoupledPath out;
  out.r = r;
  out.m = m;
  out.n_blocks = n_blocks;
  if (options.record_paths) {
    out.y.assign(std::size_t(t_end + 1), -1);
    out.y_prime.assign(std::size_t(t_end - r + 1), -1);
  }
  out.block_eta.reserve(std::size_t(n_blocks));
  out.disagree_at_boundary.reserve(std::size_t(n_blocks));

  // burn-in and the stretch up to the restart time: plain one-step evolution
  int y = options.y_init;
  if (options.record_paths && burn == 0) out.y[0] = y;
  for (std::int64_t t = -burn + 1; t <= r; ++t) {
    StochasticMatrix p = family.at(env.covariate(t - 1));
    y = path_stream.next_categorical(p.row(y));
    if (options.record_paths && t >= 0) out.y[std::size_t(t)] = y;
  }

  int yp = options.y_restart;
  if (options.record_paths) out.y_prime[0] = yp;

  for (int s = 0; s < n_blocks; ++s) {
    std::int64_t block_start = r + std::int64_t(s) * m;
    std::vector<Vec> z;
    z.reserve(std::size_t(m));
    std::vector<StochasticMatrix> steps;
    steps.reserve(std::size_t(m));
    for (int k = 0; k < m; ++k) {
      z.push_back(env.covariate(block_start + k));
      steps.push_back(family.at(z.back()));
    }
    StochasticMatrix prod = steps[0];
    for (int k = 1; k < m; ++k) prod = prod.multiply(steps[std::size_t(k)]);
    DoeblinParts parts = doeblin_decompose(prod);
    out.block_eta.push_back(parts.eta);

    int w, wp;
    if (y == yp) {
      w = path_stream.next_categorical(prod.row(y));
      wp = w;
    } else {
      bool coalesce = parts.eta > 0 && path_stream.next_uniform() < parts.eta;
      if (coalesce) {
        w = path_stream.next_categorical(parts.nu);
        wp = w;
      } else {
        if (!parts.residual_used)
          throw std::runtime_error("simulate_mre_coupled: residual branch reached with eta == 1");
        w = path_stream.next_categorical(parts.residual.row(y));
        wp = path_stream.next_categorical(parts.residual.row(yp));
      }
    }

    if (options.record_paths && m > 1) {
      std::vector<int> bridge_y = sample_bridge(steps, y, w, path_stream);
      std::vector<int> bridge_yp =
          (y == yp && w == wp) ? bridge_y : sample_bridge(steps, yp, wp, path_stream);
      for (int k = 1; k < m; ++k) {
        out.y[std::size_t(block_start + k)] = bridge_y[std::size_t(k - 1)];
        out.y_prime[std::size_t(block_start + k - r)] = bridge_yp[std::size_t(k - 1)];
      }
    }
    y = w;
    yp = wp;
    if (options.record_paths) {
      out.y[std::size_t(block_start + m)] = y;
      out.y_prime[std::size_t(block_start + m - r)] = yp;
    }
    out.disagree_at_boundary.push_back(y != yp ? 1 : 0);
    if (y == yp && out.coalescence_block < 0) out.coalescence_block = s + 1;
  }
  return out;
}

double eta_min_on_grid(const KernelFamily& family, const std::vector<Vec>& grid) {
  family.validate();
  if (grid.empty()) throw std::invalid_argument("eta_min_on_grid: empty grid");
  double tuples = std::pow(double(grid.size()), family.m);
  if (tuples > 1e6) throw std::invalid_argument("eta_min_on_grid: grid^m too large");
  // minimize over all m-tuples of grid values, since the minorized kernel is
  // the m-step product
  std::int64_t count = std::int64_t(tuples + 0.5);
  double best = 1.0;
  std::vector<Vec> z(std::size_t(family.m));
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::int64_t rem = idx;
    for (int k = 0; k < family.m; ++k) {
      z[std::size_t(k)] = grid[std::size_t(rem % std::int64_t(grid.size()))];
      rem /= std::int64_t(grid.size());
    }
    best = std::min(best, max_minorization_mass(m_step_product(family, z)));
  }
  return best;
}

}  // namespace mixsim
