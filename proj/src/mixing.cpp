#include "mixsim/mixing.hpp"

#include <cmath>
#include <stdexcept>

namespace mixsim {

JointDistribution JointDistribution::from_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("JointDistribution: empty");
  JointDistribution j;
  j.na = int(rows.size());
  j.nb = int(rows[0].size());
  j.p.reserve(std::size_t(j.na) * j.nb);
  for (const auto& r : rows) {
    if (int(r.size()) != j.nb) throw std::invalid_argument("JointDistribution: ragged rows");
    for (double v : r) j.p.push_back(v);
  }
  j.validate();
  return j;
}

JointDistribution JointDistribution::from_counts(const std::vector<std::int64_t>& counts, int na,
                                                 int nb) {
  if (na <= 0 || nb <= 0 || int(counts.size()) != na * nb)
    throw std::invalid_argument("JointDistribution: bad count table shape");
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("JointDistribution: negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("JointDistribution: no observations");
  JointDistribution j;
  j.na = na;
  j.nb = nb;
  j.p.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) j.p[i] = double(counts[i]) / double(total);
  return j;
}

std::vector<double> JointDistribution::marginal_a() const {
  std::vector<double> m(na, 0.0);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) m[a] += mass(a, b);
  return m;
}

std::vector<double> JointDistribution::marginal_b() const {
  std::vector<double> m(nb, 0.0);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) m[b] += mass(a, b);
  return m;
}

JointDistribution JointDistribution::transposed() const {
  JointDistribution t;
  t.na = nb;
  t.nb = na;
  t.p.resize(p.size());
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) t.p[std::size_t(b) * na + a] = mass(a, b);
  return t;
}

void JointDistribution::validate(double tol) const {
  double s = 0.0;
  for (double v : p) {
    if (v < -tol) throw std::invalid_argument("JointDistribution: negative mass");
    s += v;
  }
  if (std::fabs(s - 1.0) > tol) throw std::invalid_argument("JointDistribution: mass does not sum to 1");
}

double alpha_exact(const JointDistribution& joint) {
  const JointDistribution* j = &joint;
  JointDistribution t;
  if (joint.na > joint.nb) {
    t = joint.transposed();
    j = &t;
  }
  if (j->na > 20) throw std::invalid_argument("alpha_exact: alphabet too large (enumeration side > 20)");

  int na = j->na, nb = j->nb;
  std::vector<double> pa = j->marginal_a(), pb = j->marginal_b();
  // d(a,b) = P(a,b) - P(a)P(b); rows of d sum to 0, so for any subset S the
  // positive-part collection over b maximizes, and the absolute value is
  // covered by S's complement.
  std::vector<double> d(std::size_t(na) * nb);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) d[std::size_t(a) * nb + b] = j->mass(a, b) - pa[a] * pb[b];

  std::vector<double> g(nb, 0.0);
  std::uint32_t members = 0;
  double best = 0.0;
  std::uint64_t total = std::uint64_t(1) << na;
  for (std::uint64_t i = 1; i < total; ++i) {
    int bit = __builtin_ctzll(i);  // Gray-code step: toggle this element
    std::uint32_t mask = std::uint32_t(1) << bit;
    double sign = (members & mask) ? -1.0 : 1.0;
    members ^= mask;
    const double* row = &d[std::size_t(bit) * nb];
    double score = 0.0;
    for (int b = 0; b < nb; ++b) {
      g[b] += sign * row[b];
      if (g[b] > 0) score += g[b];
    }
    if (score > best) best = score;
  }
  return best;
}

double alpha_markov_exact(const std::vector<double>& pi, const StochasticMatrix& P, int n) {
  if (int(pi.size()) != P.size()) throw std::invalid_argument("alpha_markov_exact: size mismatch");
  if (n < 0) throw std::invalid_argument("alpha_markov_exact: negative lag");
  double mass = 0.0;
  for (double v : pi) {
    if (v < 0) throw std::invalid_argument("alpha_markov_exact: negative mass in pi");
    mass += v;
  }
  if (std::fabs(mass - 1.0) > 1e-10)
    throw std::invalid_argument("alpha_markov_exact: pi does not sum to 1");
  int N = P.size();
  for (int j = 0; j < N; ++j) {
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += pi[i] * P(i, j);
    if (std::fabs(s - pi[j]) > 1e-10)
      throw std::invalid_argument("alpha_markov_exact: pi is not stationary for P");
  }
  StochasticMatrix Pn = P.power(n);
  JointDistribution joint;
  joint.na = N;
  joint.nb = N;
  joint.p.resize(std::size_t(N) * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) joint.p[std::size_t(a) * N + b] = pi[a] * Pn(a, b);
  return alpha_exact(joint);
}

DecaySequence markov_alpha_envelope(const std::vector<double>& pi, const StochasticMatrix& P,
                                    int table_len) {
  if (table_len < 1) throw std::invalid_argument("markov_alpha_envelope: table_len must be >= 1");
  int N = P.size();
  int k = 0;
  double delta_k = 1.0;
  for (int kk = 1; kk <= N * N; ++kk) {
    double d = P.power(kk).dobrushin_coefficient();
    if (d < 1.0) {
      k = kk;
      delta_k = d;
      break;
    }
  }
  if (k == 0)
    throw std::invalid_argument(
        "markov_alpha_envelope: no scrambling power found; chain has no contraction envelope");
  double q, coef;
  if (delta_k == 0.0) {
    q = 0.0;
    coef = 0.0;
  } else {
    q = std::pow(delta_k, 1.0 / k);
    coef = 1.0 / delta_k;
  }
  // Extend the exact table until the analytic part is below the universal 1/4.
  int len = table_len;
  if (q > 0.0) {
    while (coef * std::pow(q, len) > 0.25 && len < table_len + 4096) ++len;
  }
  std::vector<double> values(len);
  for (int lag = 0; lag < len; ++lag) values[lag] = alpha_markov_exact(pi, P, lag);
  return DecaySequence::from_values(std::move(values), Tail::geometric(coef, q), 0);
}

AlphaEstimate alpha_empirical(const std::vector<int>& past_codes,
                              const std::vector<int>& future_codes, int n_past, int n_future,
                              int n_bootstrap, RngStream& rng) {
  if (past_codes.size() != future_codes.size())
    throw std::invalid_argument("alpha_empirical: length mismatch");
  std::int64_t R = std::int64_t(past_codes.size());
  if (R < 1000) throw std::invalid_argument("alpha_empirical: needs at least 1000 replicates");
  if (n_past <= 0 || n_future <= 0) throw std::invalid_argument("alpha_empirical: empty alphabets");

  std::vector<std::int64_t> counts(std::size_t(n_past) * n_future, 0);
  for (std::int64_t i = 0; i < R; ++i) {
    int a = past_codes[std::size_t(i)], b = future_codes[std::size_t(i)];
    if (a < 0 || a >= n_past || b < 0 || b >= n_future)
      throw std::invalid_argument("alpha_empirical: code out of range");
    ++counts[std::size_t(a) * n_future + b];
  }
  AlphaEstimate est;
  est.value = alpha_exact(JointDistribution::from_counts(counts, n_past, n_future));
  if (n_bootstrap > 1) {
    double sum = 0.0, sum_sq = 0.0;
    std::vector<std::int64_t> bcounts(counts.size());
    for (int b = 0; b < n_bootstrap; ++b) {
      std::fill(bcounts.begin(), bcounts.end(), 0);
      for (std::int64_t i = 0; i < R; ++i) {
        std::int64_t pick = std::int64_t(rng.next_uniform() * double(R));
        if (pick >= R) pick = R - 1;
        ++bcounts[std::size_t(past_codes[std::size_t(pick)]) * n_future +
                  future_codes[std::size_t(pick)]];
      }
      double a = alpha_exact(JointDistribution::from_counts(bcounts, n_past, n_future));
      sum += a;
      sum_sq += a * a;
    }
    double mean = sum / n_bootstrap;
    double var = (sum_sq - n_bootstrap * mean * mean) / double(n_bootstrap - 1);
    est.se = var > 0 ? std::sqrt(var) : 0.0;
  }
  return est;
}

}  // namespace mixsim
