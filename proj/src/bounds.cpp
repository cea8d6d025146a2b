#include "mixsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace mixsim {

namespace {

constexpr double kUniversalCap = 0.25;
constexpr std::int64_t kSeriesHardCap = std::int64_t(1) << 20;
constexpr std::int64_t kRestartHardCap = std::int64_t(1) << 12;

// certified sum_{s>=S} beta^sqrt(s): first term plus the integral of the
// decreasing integrand
double sqrt_geo_tail(double S, double beta) {
  if (beta <= 0.0) return 0.0;
  if (beta >= 1.0) throw std::invalid_argument("sqrt_geo_tail: ratio must be < 1");
  double c = -std::log(beta);
  double x = std::sqrt(S);
  return std::exp(-c * x) * (1.0 + 2.0 * (x / c + 1.0 / (c * c)));
}

// certified sum_{s>=S} (sqrt(s)+1) beta^sqrt(s); caller must ensure the
// integrand is decreasing from S on: sqrt(S) >= 1/c - 1
double sqrt_geo_poly_tail(double S, double beta) {
  if (beta <= 0.0) return 0.0;
  if (beta >= 1.0) throw std::invalid_argument("sqrt_geo_poly_tail: ratio must be < 1");
  double c = -std::log(beta);
  double x = std::sqrt(S);
  double integral = 2.0 * std::exp(-c * x) *
                    ((x * x / c + 2.0 * x / (c * c) + 2.0 / (c * c * c)) + (x / c + 1.0 / (c * c)));
  return (x + 1.0) * std::exp(-c * x) + integral;
}

// certified sum_{s>=S} s^-a for a > 1
double power_tail_sum(double S, double a) {
  if (a <= 1.0) throw std::invalid_argument("power_tail_sum: exponent must exceed 1");
  return std::pow(S, -a) + std::pow(S, 1.0 - a) / (a - 1.0);
}

// inf over j of rho^floor(s/j) + 4 alpha((j-1)m+off)/(1-rho), capped at the
// trivial bound 1; candidates are a small-j table plus the rate schedule
double ult_value(std::int64_t s, double rho, int m, int off, const DecaySequence& alpha,
                 int j_table, double l) {
  double best = 1.0;
  std::int64_t j_hi = std::max<std::int64_t>(1, s - 1);
  int fi = alpha.first_index();
  std::int64_t j_lo = 1;
  if (fi > off) j_lo = 1 + (std::int64_t(fi) - off + m - 1) / m;
  if (j_lo > j_hi) return best;
  auto eval = [&](std::int64_t j) {
    std::int64_t idx = (j - 1) * m + off;
    if (idx > (std::int64_t(1) << 30)) return;
    double term =
        std::pow(rho, double(s / j)) + 4.0 * alpha.at(int(idx)) / (1.0 - rho);
    if (term < best) best = term;
  };
  std::int64_t j_small_hi = std::min<std::int64_t>(j_hi, j_lo + j_table - 1);
  for (std::int64_t j = j_lo; j <= j_small_hi; ++j) eval(j);
  std::int64_t js = schedule_j(s, l);
  if (js >= j_lo && js <= j_hi) eval(js);
  return best;
}

// remainder sum_{s>=S0} of the envelope of ult_value at j(s) = ceil(sqrt(s)),
// for alpha with a zero or geometric tail
std::optional<double> ult_tail_geometric(std::int64_t S0, double rho, int m, int off,
                                         const GeometricEnvelope& env) {
  if (S0 < 3) return std::nullopt;  // j(s) <= s-1 needs s >= 3
  double rt = std::sqrt(double(S0));
  if ((rt - 1.0) * m + off < double(env.from)) return std::nullopt;
  double val = 0.0;
  if (rho > 0.0) val += sqrt_geo_tail(double(S0), rho) / (rho * rho);
  if (env.coef > 0.0 && env.ratio > 0.0) {
    double qm = std::pow(env.ratio, m);
    val += 4.0 * env.coef * std::pow(env.ratio, double(off - m)) / (1.0 - rho) *
           sqrt_geo_tail(double(S0), qm);
  }
  return val;
}

// same remainder for alpha with a power tail of exponent kappa > 1, using
// j(s) = ceil(s^l) with l = (1+1/kappa)/2
std::optional<double> ult_tail_power(std::int64_t S0, double rho, int m, int off,
                                     double coef, double kappa, int from) {
  double l = 0.5 * (1.0 + 1.0 / kappa);
  double S0l = std::pow(double(S0), l);
  if (S0l < 2.0) return std::nullopt;                       // j-1 >= s^l / 2
  if (double(S0) - S0l < 2.0) return std::nullopt;          // j(s) <= s-1
  if ((S0l - 1.0) * m + off < double(from)) return std::nullopt;
  double lk = 0.5 * (kappa + 1.0);
  double val = 4.0 * coef * std::pow(0.5 * m, -kappa) / (1.0 - rho) *
               power_tail_sum(double(S0), lk);
  if (rho > 0.0) {
    double c2 = 0.5 * std::log(1.0 / rho);
    double oml = 1.0 - l;
    double w0 = std::pow(double(S0), oml);
    double bhat = l / oml;
    if (c2 * w0 < 2.0 * bhat) return std::nullopt;  // incomplete-gamma bound
    val += (1.0 / rho) * std::exp(-c2 * w0) * (1.0 + 2.0 * S0l / (oml * c2));
  }
  return val;
}

struct UltSeries {
  double value = 0.0;
  double tail_part = 0.0;
  int cap_used = 0;
};

// sum_{t>=r+d} of ult_value at s_t = floor((t-r)/m): the block index s_n
// repeats m - d mod m times, every later s repeats m times, and the range
// beyond the cap is certified in closed form
UltSeries ult_series(std::int64_t d, int m, double rho, const DecaySequence& alpha, int off,
                     int cap0, int j_table) {
  std::int64_t s_n = d / m;
  TailKind tk = alpha.tail().kind;
  double l = 0.5;
  if (tk == TailKind::power) {
    if (alpha.tail().exponent <= 1.0)
      throw std::invalid_argument("series bound: power alpha tail needs exponent > 1");
    l = 0.5 * (1.0 + 1.0 / alpha.tail().exponent);
  } else if (tk == TailKind::none) {
    throw std::invalid_argument("series bound: alpha needs a declared zero/geometric/power tail");
  }

  std::int64_t cap = std::max<std::int64_t>(cap0, 8);
  double tail = 0.0;
  for (;;) {
    std::int64_t S0 = std::max(cap + 1, s_n + 1);
    std::optional<double> t;
    if (tk == TailKind::power) {
      t = ult_tail_power(S0, rho, m, off, alpha.tail().coef, alpha.tail().exponent,
                         alpha.table_end());
    } else {
      t = ult_tail_geometric(S0, rho, m, off, *alpha.geometric_envelope());
    }
    if (t) {
      tail = *t;
      break;
    }
    if (cap >= kSeriesHardCap)
      throw std::runtime_error(
          "series bound: remainder could not be certified within the cap limit");
    cap *= 2;
  }

  double exact = 0.0;
  for (std::int64_t s = s_n + 1; s <= cap; ++s)
    exact += ult_value(s, rho, m, off, alpha, j_table, l);
  double head = double(m - int(d % m)) * ult_value(s_n, rho, m, off, alpha, j_table, l);
  UltSeries out;
  out.value = head + double(m) * (exact + tail);
  out.tail_part = double(m) * tail;
  out.cap_used = int(cap);
  return out;
}

void check_lag(std::int64_t r) {
  if (r > (std::int64_t(1) << 30)) throw std::invalid_argument("lag too large");
}

BoundResult finish(double leading, double series, double tail_remainder, int cap_used) {
  BoundResult out;
  out.leading = leading;
  out.series = series;
  out.tail_remainder = tail_remainder;
  out.cap_used = cap_used;
  out.raw = leading + series;
  out.bound = std::min(out.raw, kUniversalCap);
  return out;
}

}  // namespace

UltBound lemma_ult_bound(int s, double rho, const DecaySequence& alpha_kappa, int j_max,
                         double factor) {
  if (s < 1) throw std::invalid_argument("lemma_ult_bound: s must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("lemma_ult_bound: rho must lie in [0,1)");
  if (factor <= 0.0) throw std::invalid_argument("lemma_ult_bound: factor must be positive");
  int j_hi = j_max > 0 ? j_max : std::max(1, s - 1);
  int j_lo = std::max(1, alpha_kappa.first_index());
  UltBound best;
  best.value = std::numeric_limits<double>::infinity();
  for (int j = j_lo; j <= j_hi; ++j) {
    double term = std::pow(rho, double(s / j)) + factor * alpha_kappa.at(j) / (1.0 - rho);
    if (term < best.value) {
      best.value = term;
      best.j = j;
    }
  }
  if (best.j == 0) throw std::invalid_argument("lemma_ult_bound: no feasible block count j");
  return best;
}

double product_moment_markov(const StochasticMatrix& transition, const std::vector<double>& pi,
                             const std::vector<double>& v, int s) {
  int n = transition.size();
  if (int(pi.size()) != n || int(v.size()) != n)
    throw std::invalid_argument("product_moment_markov: size mismatch");
  if (s < 1) throw std::invalid_argument("product_moment_markov: s must be >= 1");
  double psum = 0.0;
  for (double p : pi) {
    if (p < -1e-12) throw std::invalid_argument("product_moment_markov: negative pi");
    psum += p;
  }
  if (std::fabs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("product_moment_markov: pi must sum to 1");
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += pi[std::size_t(i)] * transition(i, j);
    if (std::fabs(col - pi[std::size_t(j)]) > 1e-10)
      throw std::invalid_argument("product_moment_markov: pi is not stationary");
  }
  std::vector<double> w((std::size_t(n)));
  for (int i = 0; i < n; ++i) w[std::size_t(i)] = pi[std::size_t(i)] * v[std::size_t(i)];
  for (int step = 1; step < s; ++step) {
    std::vector<double> nw(std::size_t(n), 0.0);
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += w[std::size_t(i)] * transition(i, j);
      nw[std::size_t(j)] = acc * v[std::size_t(j)];
    }
    w.swap(nw);
  }
  double total = 0.0;
  for (double x : w) total += x;
  return total;
}

double lemma_ult3_bound(std::int64_t t, double C, double a, double p,
                        const std::vector<double>& v) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("lemma_ult3_bound: a must be in [0,1)");
  if (p < 1.0) throw std::invalid_argument("lemma_ult3_bound: p must be >= 1");
  if (C < 0.0) throw std::invalid_argument("lemma_ult3_bound: C must be >= 0");
  if (v.empty()) throw std::invalid_argument("lemma_ult3_bound: v must cover index 0");
  for (double x : v)
    if (!(x >= 0.0)) throw std::invalid_argument("lemma_ult3_bound: v must be nonnegative");
  double a1p = std::pow(a, 1.0 / p);
  if (t <= 0) return C + v[0] / (1.0 - a1p);
  if (std::int64_t(v.size()) <= t)
    throw std::invalid_argument("lemma_ult3_bound: v must cover indices 0..t");
  double sum = 0.0;
  double f = 1.0;  // a^{j/p}
  for (std::int64_t j = 0; j < t; ++j) {
    sum += f * v[std::size_t(t - j)];
    f *= a1p;
  }
  double atp = std::pow(a, double(t) / p);
  return sum + (C + v[0] / (1.0 - a1p)) * atp;
}

std::vector<double> bstar_sequence(const DecaySequence& b, int len) {
  if (len < 1) throw std::invalid_argument("bstar_sequence: len must be >= 1");
  if (b.first_index() != 0)
    throw std::invalid_argument("bstar_sequence: b must be indexed from 0");
  int n_b = std::max(1, len - 1);
  std::vector<double> bv((std::size_t(n_b)));
  for (int i = 0; i < n_b; ++i) {
    bv[std::size_t(i)] = b.at(i);
    if (!(bv[std::size_t(i)] >= 0.0 && bv[std::size_t(i)] <= 1.0))
      throw std::invalid_argument("bstar_sequence: b values must be probabilities");
  }
  std::vector<double> out((std::size_t(len)));
  out[0] = bv[0];
  std::vector<double> st(std::size_t(len), 0.0), nx(std::size_t(len), 0.0);
  st[0] = 1.0;
  for (int k = 1; k < len; ++k) {
    double ret = 0.0;
    for (int i = 0; i < k; ++i) ret += st[std::size_t(i)] * bv[std::size_t(i)];
    nx[0] = ret;
    for (int i = 0; i < k; ++i) nx[std::size_t(i + 1)] = st[std::size_t(i)] * (1.0 - bv[std::size_t(i)]);
    out[std::size_t(k)] = ret;
    st.swap(nx);
  }
  return out;
}

DecaySequence bstar_certified(const DecaySequence& b, int cap) {
  cap = std::max(cap, 16);
  if (cap > int(kRestartHardCap) * 256)
    throw std::invalid_argument("bstar_certified: cap too large");
  auto env = b.geometric_envelope();
  if (!env)
    throw std::invalid_argument("bstar_certified: b needs a zero or geometric tail to certify");
  std::vector<double> table = bstar_sequence(b, cap + 1);

  // log first-passage masses g_i = b_{i-1} prod_{k<=i-2}(1-b_k), i = 1..I
  int I = env->from + 64;
  std::vector<double> lg(std::size_t(I + 1), -std::numeric_limits<double>::infinity());
  double cum = 0.0;
  for (int i = 1; i <= I; ++i) {
    double bb = b.at(i - 1);
    if (bb > 0.0 && std::isfinite(cum)) lg[std::size_t(i)] = std::log(bb) + cum;
    cum += bb >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-bb);
  }

  std::vector<double> grid;
  for (int k = 1; k < 32; ++k) grid.push_back(env->ratio + (1.0 - env->ratio) * k / 32.0);
  for (double t : {0.5, 0.9, 0.99}) grid.push_back(t);

  double best_measure = std::numeric_limits<double>::infinity();
  double best_m = 0.0, best_tau = 0.0;
  for (double tau : grid) {
    if (!(tau > env->ratio + 1e-12 && tau < 1.0)) continue;
    double lt = std::log(tau);
    double gbar = 0.0;
    bool feasible = true;
    for (int i = 1; i <= I; ++i) {
      if (!std::isfinite(lg[std::size_t(i)])) continue;
      double ex = lg[std::size_t(i)] - double(i) * lt;
      if (ex > 700.0) {
        feasible = false;
        break;
      }
      gbar += std::exp(ex);
    }
    if (!feasible) continue;
    if (env->coef > 0.0) {
      double x = env->ratio / tau;
      gbar += (env->coef / tau) * std::pow(x, I) / (1.0 - x);
    }
    if (gbar > 1.0) continue;
    // M >= R_n tau^-n for n = 0..cap, with R_0 = 1
    double lM = 0.0;
    for (int nstep = 1; nstep <= cap && feasible; ++nstep) {
      double rn = table[std::size_t(nstep)];
      if (rn <= 0.0) continue;
      double ex = std::log(rn) - double(nstep) * lt;
      if (ex > 700.0) feasible = false;
      if (ex > lM) lM = ex;
    }
    if (!feasible) continue;
    double M = std::exp(lM);
    double measure = M * std::pow(tau, cap + 1) / (1.0 - tau);
    if (measure < best_measure) {
      best_measure = measure;
      best_m = M;
      best_tau = tau;
    }
  }
  if (!(best_tau > 0.0))
    throw std::runtime_error(
        "bstar_certified: no geometric envelope certified (is b summable?)");
  return DecaySequence::from_values(std::move(table), Tail::geometric(best_m, best_tau), 0);
}

double geometric_block_sum(std::int64_t d, int m, double x) {
  if (d < 1) throw std::invalid_argument("geometric_block_sum: d must be >= 1");
  if (m < 1) throw std::invalid_argument("geometric_block_sum: m must be >= 1");
  if (!(x >= 0.0 && x < 1.0))
    throw std::invalid_argument("geometric_block_sum: x must lie in [0,1)");
  std::int64_t s = d / m;
  double head = double(m - int(d % m)) * std::pow(x, double(s));
  return head + double(m) * std::pow(x, double(s + 1)) / (1.0 - x);
}

BoundResult thm1_bound(std::int64_t n, std::int64_t r, int m, double rho,
                       const DecaySequence& alpha_x, const SeriesBoundOptions& opts) {
  if (r < 0 || n <= r) throw std::invalid_argument("thm1_bound: need 0 <= r < n");
  if (m < 1) throw std::invalid_argument("thm1_bound: m must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("thm1_bound: rho must lie in [0,1)");
  check_lag(r);
  int off = opts.lag_offset >= 0 ? opts.lag_offset : 1;
  double leading = 4.0 * alpha_x.at(int(r));
  std::int64_t d = n - r;
  if (opts.deterministic_eta)
    return finish(leading, 2.0 * geometric_block_sum(d, m, rho), 0.0, 0);
  UltSeries us = ult_series(d, m, rho, alpha_x, off, opts.cap, opts.j_table);
  return finish(leading, 2.0 * us.value, 2.0 * us.tail_part, us.cap_used);
}

BoundResult thm3_bound(std::int64_t n, std::int64_t r, int m, double rho,
                       const DecaySequence& alpha_zeta, const SeriesBoundOptions& opts) {
  if (r < 0 || n <= r) throw std::invalid_argument("thm3_bound: need 0 <= r < n");
  if (m < 1) throw std::invalid_argument("thm3_bound: m must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("thm3_bound: rho must lie in [0,1)");
  check_lag(r + 1);
  int off = opts.lag_offset >= 0 ? opts.lag_offset : 0;
  double leading = alpha_zeta.at(int(r + 1));
  std::int64_t d = n - r;
  if (opts.deterministic_eta)
    return finish(leading, 2.0 * geometric_block_sum(d, m, rho), 0.0, 0);
  UltSeries us = ult_series(d, m, rho, alpha_zeta, off, opts.cap, opts.j_table);
  return finish(leading, 2.0 * us.value, 2.0 * us.tail_part, us.cap_used);
}

BoundResult thm2_bound(std::int64_t n, std::int64_t r, const DecaySequence& a,
                       const DecaySequence& b, double x_norm, const DecaySequence& alpha_x,
                       const Thm2Options& opts) {
  if (r < 0 || n <= r) throw std::invalid_argument("thm2_bound: need 0 <= r < n");
  if (x_norm < 0.0) throw std::invalid_argument("thm2_bound: x_norm must be >= 0");
  check_lag(r);
  std::int64_t T = n - r - 1;
  if (T > kRestartHardCap * 64)
    throw std::invalid_argument("thm2_bound: n - r too large for the convolution table");

  // Ssum(t) = sum_{u>=t} S_u with S_u the tail of a from u
  auto ssum = [&](std::int64_t t) {
    std::int64_t tt = std::max<std::int64_t>(t, 0);
    return a.weighted_tail_sum_from(int(tt)) - double(tt - 1) * a.tail_sum_from(int(tt));
  };

  DecaySequence bs = bstar_certified(b, std::max(opts.cap, int(T)));
  double term_b = bs.tail_sum_from(int(T));
  double term_s = ssum(n - r);
  double conv = bs.tail_sum_from(int(T)) * ssum(0);
  for (std::int64_t j = 0; j < T; ++j) conv += bs.at(int(j)) * ssum(T - j);

  double leading = 4.0 * alpha_x.at(int(r));
  double series = 2.0 * term_b + 4.0 * x_norm * term_s + 4.0 * x_norm * conv;
  double remainder = 2.0 * bs.tail_sum_from(std::max(int(T), bs.table_end()));
  return finish(leading, series, remainder, std::max(opts.cap, int(T)));
}

OmegaValue omega_value(std::int64_t s, const DecaySequence& a, const DecaySequence& b,
                       int p_max) {
  if (s < 0) throw std::invalid_argument("omega_value: s must be >= 0");
  if (p_max < 1) throw std::invalid_argument("omega_value: p_max must be >= 1");
  if (a.first_index() != 1 || b.first_index() != 1)
    throw std::invalid_argument("omega_value: a and b must be indexed from 1");
  double abar = a.tail_sum_from(1);
  if (!(abar < 1.0)) throw std::invalid_argument("omega_value: sum of a must be < 1");
  std::vector<double> T(std::size_t(s + 2));
  for (std::int64_t u = 0; u <= s + 1; ++u)
    T[std::size_t(u)] = b.tail_sum_from(int(std::max<std::int64_t>(u, 1)));
  OmegaValue best;
  best.value = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    double a1p = std::pow(abar, 1.0 / p);
    double val = std::pow(abar, double(s) / p) + a.tail_sum_from(p + 1);
    double f = 1.0;
    for (std::int64_t j = 0; j <= s + 1; ++j) {
      val += f * T[std::size_t(s + 1 - j)];
      f *= a1p;
    }
    if (val < best.value) {
      best.value = val;
      best.p = p;
    }
  }
  return best;
}

namespace {

// certified sum_{s>=S0} omega(s)^e through a four-term sqrt-geometric
// envelope of omega at p(s) = ceil(sqrt(s))
std::optional<double> omega_tail(std::int64_t S0, double e, const DecaySequence& a,
                                 const DecaySequence& b) {
  auto aenv = a.geometric_envelope();
  auto benv = b.geometric_envelope();
  if (!aenv || !benv)
    throw std::invalid_argument("restart series: a and b need zero or geometric tails");
  double abar = a.tail_sum_from(1);

  // uniform envelope T(u) <= CT * qtb^u for all u >= 0
  double qtb = benv->ratio, Ab = benv->coef;
  if (Ab <= 0.0 || qtb <= 0.0) {
    qtb = 0.5;
    Ab = 0.0;
  }
  double CT = Ab > 0.0 ? Ab / (1.0 - benv->ratio) : 0.0;
  for (int u = 1; u < benv->from; ++u)
    CT = std::max(CT, b.tail_sum_from(u) / std::pow(qtb, u));
  double CTT = b.tail_sum_from(1) + b.weighted_tail_sum_from(1);

  double S = double(S0);
  if (abar <= 0.0) {
    // omega(s) = T(s+1) exactly; geometric sum of the uniform envelope
    if (CT <= 0.0) return 0.0;
    double qe = std::pow(qtb, e);
    return std::pow(CT, e) * std::pow(qtb, e * double(S0 + 1)) / (1.0 - qe);
  }

  // term 2 needs p(s)+1 past the a-envelope table for every s >= S0
  if (std::ceil(std::sqrt(S)) + 1.0 < double(aenv->from)) return std::nullopt;

  double total = 0.0;
  // abar^{s/p} <= (1/abar) abar^{sqrt s}
  total += std::pow(1.0 / abar, e) * sqrt_geo_tail(S, std::pow(abar, e));
  // a-tail from p+1
  if (aenv->coef > 0.0 && aenv->ratio > 0.0) {
    double E2 = aenv->coef * aenv->ratio / (1.0 - aenv->ratio);
    total += std::pow(E2, e) * sqrt_geo_tail(S, std::pow(aenv->ratio, e));
  }
  // near half of the convolution: T factors at least (s/2) deep
  if (CT > 0.0) {
    double b3 = std::pow(std::sqrt(qtb), e);
    double c3 = -std::log(b3);
    if (std::sqrt(S) < 1.0 / c3 - 1.0) return std::nullopt;  // monotone integrand
    double E3 = CT / (1.0 - abar);
    total += std::pow(E3, e) * sqrt_geo_poly_tail(S, b3);
  }
  // far half: abar factors at least (s+1)/2 deep
  if (CTT > 0.0) {
    double E4 = CTT / std::sqrt(abar);
    total += std::pow(E4, e) * sqrt_geo_tail(S, std::pow(std::sqrt(abar), e));
  }
  return total;
}

}  // namespace

BoundResult cor_mixing_bound(std::int64_t n, std::int64_t r, const DecaySequence& a,
                             const DecaySequence& b, const DecaySequence& alpha_zeta,
                             const CorOptions& opts) {
  if (r < 0 || n <= r) throw std::invalid_argument("cor_mixing_bound: need 0 <= r < n");
  if (!(opts.exponent > 0.0 && opts.exponent <= 1.0))
    throw std::invalid_argument("cor_mixing_bound: exponent must lie in (0,1]");
  if (opts.scale < 0.0) throw std::invalid_argument("cor_mixing_bound: scale must be >= 0");
  check_lag(r + 1);
  std::int64_t d = n - r;

  std::int64_t cap = std::max<std::int64_t>(opts.cap, 8);
  double tail = 0.0;
  for (;;) {
    std::int64_t S0 = std::max(cap + 1, d);
    std::optional<double> t = omega_tail(S0, opts.exponent, a, b);
    if (t) {
      tail = *t;
      break;
    }
    if (cap >= kRestartHardCap)
      throw std::runtime_error(
          "cor_mixing_bound: remainder could not be certified within the cap limit");
    cap *= 2;
  }
  double exact = 0.0;
  for (std::int64_t s = d; s <= cap; ++s)
    exact += std::pow(omega_value(s, a, b, opts.p_max).value, opts.exponent);

  double leading = alpha_zeta.at(int(r + 1));
  return finish(leading, opts.scale * (exact + tail), opts.scale * tail, int(cap));
}

RateSchedule rate_schedule(std::int64_t n, const DecaySequence& alpha_x) {
  if (n < 1) throw std::invalid_argument("rate_schedule: n must be >= 1");
  RateSchedule out;
  out.r = n / 2;
  switch (alpha_x.tail().kind) {
    case TailKind::zero:
    case TailKind::geometric:
      out.l = 0.5;
      break;
    case TailKind::power: {
      double k = alpha_x.tail().exponent;
      out.l = 0.5 * (1.0 + 1.0 / k);
      out.degenerate = 0.5 * (k + 1.0) < 1.05;
      break;
    }
    case TailKind::none:
      throw std::invalid_argument("rate_schedule: alpha needs a declared tail");
  }
  return out;
}

std::int64_t schedule_j(std::int64_t s, double l) {
  if (s <= 1) return 1;
  double j = std::ceil(std::pow(double(s), l));
  return j < 1.0 ? 1 : std::int64_t(j);
}

}  // namespace mixsim
