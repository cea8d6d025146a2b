#include "mixsim/random_maps.hpp"

#include <cmath>
#include <stdexcept>

#include "mixsim/util.hpp"

namespace mixsim {

std::int64_t embedded_count(int n_states, int p) {
  if (n_states < 2 || p < 1) throw std::invalid_argument("embedded space: need N >= 2, p >= 1");
  double total = std::pow(double(n_states), p);
  if (total > 1e6) throw std::invalid_argument("embedded space: N^p too large");
  return std::int64_t(total + 0.5);
}

int encode_history(const std::vector<int>& hist, int n_states) {
  int code = 0;
  for (std::size_t k = hist.size(); k-- > 0;) {
    int y = hist[k];
    if (y < 0 || y >= n_states) throw std::invalid_argument("encode_history: value out of range");
    code = code * n_states + y;
  }
  return code;
}

std::vector<int> decode_history(int code, int n_states, int p) {
  std::vector<int> hist((std::size_t(p)));
  for (int k = 0; k < p; ++k) {
    hist[std::size_t(k)] = code % n_states;
    code /= n_states;
  }
  return hist;
}

int embedded_front(int code, int n_states) { return code % n_states; }

int image_count(const std::vector<int>& table) {
  std::vector<char> seen(table.size(), 0);
  int count = 0;
  for (int v : table) {
    if (v < 0 || v >= int(table.size()))
      throw std::invalid_argument("image_count: table entry out of range");
    if (!seen[std::size_t(v)]) {
      seen[std::size_t(v)] = 1;
      ++count;
    }
  }
  return count;
}

void MapModelSpec::validate() const {
  if (n_states < 2) throw std::invalid_argument("MapModelSpec: need at least 2 states");
  if (p < 1) throw std::invalid_argument("MapModelSpec: p must be >= 1");
  embedded_count(n_states, p);
  covariates.validate();
  noise.validate();
  switch (kind) {
    case Kind::multinomial:
      if (!probs) throw std::invalid_argument("MapModelSpec: multinomial needs probs");
      if (noise.kind != NoiseSpec::Kind::uniform01)
        throw std::invalid_argument("MapModelSpec: multinomial needs uniform01 noise");
      break;
    case Kind::ordinal: {
      if (!g) throw std::invalid_argument("MapModelSpec: ordinal needs g");
      if (int(thresholds.size()) != n_states - 1)
        throw std::invalid_argument("MapModelSpec: ordinal needs N-1 thresholds");
      for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
          throw std::invalid_argument("MapModelSpec: thresholds must be strictly increasing");
      if (noise.dim != 1)
        throw std::invalid_argument("MapModelSpec: ordinal needs scalar noise");
      break;
    }
    case Kind::multiple_choice:
      if (!scores) throw std::invalid_argument("MapModelSpec: multiple_choice needs scores");
      if (noise.dim != n_states)
        throw std::invalid_argument("MapModelSpec: multiple_choice needs noise dimension N");
      break;
  }
}

int map_step_value(const MapModelSpec& spec, const std::vector<int>& y_hist, const Vec& x,
                   const Vec& eps) {
  switch (spec.kind) {
    case MapModelSpec::Kind::multinomial: {
      std::vector<double> h = spec.probs(y_hist, x);
      if (int(h.size()) != spec.n_states)
        throw std::invalid_argument("map_step_value: probs size mismatch");
      double sum = 0.0;
      for (double v : h) {
        if (!(v > 0)) throw std::invalid_argument("map_step_value: H is not strictly positive");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("map_step_value: H does not sum to 1");
      double u = eps[0];
      double cum = 0.0;
      for (int i = 0; i + 1 < spec.n_states; ++i) {
        cum += h[std::size_t(i)];
        if (u <= cum) return i;  // cells (cum_{i-1}, cum_i]
      }
      return spec.n_states - 1;
    }
    case MapModelSpec::Kind::ordinal: {
      double v = spec.g(y_hist, x) + eps[0];
      for (int i = 0; i < spec.n_states - 1; ++i)
        if (v <= spec.thresholds[std::size_t(i)]) return i;
      return spec.n_states - 1;
    }
    case MapModelSpec::Kind::multiple_choice: {
      std::vector<double> s = spec.scores(y_hist, x);
      if (int(s.size()) != spec.n_states)
        throw std::invalid_argument("map_step_value: scores size mismatch");
      int best = 0;
      double best_v = s[0] + eps[0];
      for (int i = 1; i < spec.n_states; ++i) {
        double v = s[std::size_t(i)] + eps[std::size_t(i)];
        if (v > best_v) {  // ties keep the lowest index
          best_v = v;
          best = i;
        }
      }
      return best;
    }
  }
  throw std::invalid_argument("map_step_value: unknown kind");
}

RandomMapRealization realize_map(const MapModelSpec& spec, const Vec& x, const Vec& eps) {
  spec.validate();
  std::int64_t total = embedded_count(spec.n_states, spec.p);
  RandomMapRealization map;
  map.n_states = spec.n_states;
  map.p = spec.p;
  map.table.resize(std::size_t(total));
  std::int64_t shift_mod = total / spec.n_states;  // N^{p-1}
  for (std::int64_t e = 0; e < total; ++e) {
    std::vector<int> hist = decode_history(int(e), spec.n_states, spec.p);
    int v = map_step_value(spec, hist, x, eps);
    map.table[std::size_t(e)] = v + int(e % shift_mod) * spec.n_states;
  }
  return map;
}

RandomMapRealization compose(const std::vector<RandomMapRealization>& maps) {
  if (maps.empty()) throw std::invalid_argument("compose: empty map list");
  for (const auto& m : maps)
    if (m.n_states != maps[0].n_states || m.p != maps[0].p || m.table.size() != maps[0].table.size())
      throw std::invalid_argument("compose: maps live on different spaces");
  RandomMapRealization out;
  out.n_states = maps[0].n_states;
  out.p = maps[0].p;
  out.table.resize(maps[0].table.size());
  for (std::size_t e = 0; e < out.table.size(); ++e) {
    int cur = int(e);
    for (const auto& m : maps) cur = m.table[std::size_t(cur)];  // earliest applied first
    out.table[e] = cur;
  }
  return out;
}

namespace {

// embedded one-point step without building the full table
int embedded_point_step(const MapModelSpec& spec, int code, const Vec& x, const Vec& eps,
                        std::int64_t shift_mod) {
  std::vector<int> hist = decode_history(code, spec.n_states, spec.p);
  int v = map_step_value(spec, hist, x, eps);
  return v + int(code % shift_mod) * spec.n_states;
}

BackwardSampleResult backward_on_env(const MapModelSpec& spec, EnvironmentSequence& env,
                                     int max_depth, int chunk) {
  std::int64_t total = embedded_count(spec.n_states, spec.p);
  std::vector<int> composed;  // F_{-n+1..0} once non-empty
  int n = 0;
  BackwardSampleResult out;
  while (n < max_depth) {
    // prepend the block of times (-n-chunk+1 .. -n), earliest first
    std::vector<RandomMapRealization> block;
    block.reserve(std::size_t(chunk));
    for (int k = chunk - 1; k >= 0; --k) {
      std::int64_t t = -std::int64_t(n) - k;
      block.push_back(realize_map(spec, env.covariate(t - 1), env.noise(t)));
    }
    RandomMapRealization bc = compose(block);
    if (composed.empty()) {
      composed = bc.table;
    } else {
      std::vector<int> next(composed.size());
      for (std::size_t e = 0; e < composed.size(); ++e)
        next[e] = composed[std::size_t(bc.table[e])];
      composed = std::move(next);
    }
    n += chunk;
    if (image_count(composed) == 1) {
      out.coalesced = true;
      out.embedded_state = composed[0];
      out.value = embedded_front(composed[0], spec.n_states);
      out.depth = n;
      return out;
    }
  }
  out.depth = n;
  (void)total;
  return out;
}

}  // namespace

CoalescenceReport estimate_rho(const MapModelSpec& spec, int m, std::int64_t replicates,
                               RngStream base_stream) {
  spec.validate();
  if (m < 1) throw std::invalid_argument("estimate_rho: m must be >= 1");
  if (replicates < 1) throw std::invalid_argument("estimate_rho: need replicates");
  std::vector<char> hit(std::size_t(replicates), 0);
  parallel_for(replicates, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      EnvironmentSequence env(spec.covariates, spec.noise, spec.mode,
                              base_stream.substream(std::uint64_t(rep)));
      std::vector<RandomMapRealization> maps;
      maps.reserve(std::size_t(m));
      for (int t = 1; t <= m; ++t)
        maps.push_back(realize_map(spec, env.covariate(t - 1), env.noise(t)));
      hit[std::size_t(rep)] = image_count(compose(maps).table) == 1 ? 1 : 0;
    }
  });
  CoalescenceReport rep;
  rep.m = m;
  rep.replicates = replicates;
  for (char c : hit) rep.collapsed += c;
  rep.rho_hat = 1.0 - double(rep.collapsed) / double(replicates);
  rep.se = proportion_se(rep.rho_hat, replicates);
  return rep;
}

BackwardSampleResult backward_sample(const MapModelSpec& spec, int max_depth, int chunk,
                                     RngStream base_stream) {
  spec.validate();
  if (max_depth < 1) throw std::invalid_argument("backward_sample: max_depth must be >= 1");
  if (chunk < 1) chunk = spec.p;
  EnvironmentSequence env(spec.covariates, spec.noise, spec.mode, base_stream);
  return backward_on_env(spec, env, max_depth, chunk);
}

MapsCoupledPath simulate_maps_coupled(const MapModelSpec& spec, std::int64_t r,
                                      std::int64_t horizon, const MapsCouplingOptions& options,
                                      RngStream base_stream) {
  spec.validate();
  if (r < 0 || horizon < r) throw std::invalid_argument("simulate_maps_coupled: need 0 <= r <= horizon");
  if (!StateSpace(spec.n_states).contains(options.y_restart))
    throw std::invalid_argument("simulate_maps_coupled: restart value out of range");
  std::int64_t total = embedded_count(spec.n_states, spec.p);
  std::int64_t shift_mod = total / spec.n_states;

  EnvironmentSequence env(spec.covariates, spec.noise, spec.mode, base_stream);
  int chunk = options.backward_chunk >= 1 ? options.backward_chunk : spec.p;
  BackwardSampleResult init = backward_on_env(spec, env, options.backward_max_depth, chunk);
  if (!init.coalesced)
    throw std::runtime_error(
        "simulate_maps_coupled: backward initialization did not coalesce; raise backward_max_depth");

  MapsCoupledPath out;
  out.r = r;
  out.init_depth = init.depth;
  out.disagree_embedded.resize(std::size_t(horizon - r + 1));
  out.disagree_value.resize(std::size_t(horizon - r + 1));

  int ye = init.embedded_state;
  for (std::int64_t t = 1; t <= r; ++t)
    ye = embedded_point_step(spec, ye, env.covariate(t - 1), env.noise(t), shift_mod);

  std::vector<int> hist(std::size_t(spec.p), options.y_restart);
  int ype = encode_history(hist, spec.n_states);
  out.disagree_embedded[0] = ye != ype ? 1 : 0;
  out.disagree_value[0] =
      embedded_front(ye, spec.n_states) != embedded_front(ype, spec.n_states) ? 1 : 0;

  for (std::int64_t t = r + 1; t <= horizon; ++t) {
    const Vec& x = env.covariate(t - 1);
    const Vec& eps = env.noise(t);
    bool together = ye == ype;
    ye = embedded_point_step(spec, ye, x, eps, shift_mod);
    ype = together ? ye : embedded_point_step(spec, ype, x, eps, shift_mod);
    out.disagree_embedded[std::size_t(t - r)] = ye != ype ? 1 : 0;
    out.disagree_value[std::size_t(t - r)] =
        embedded_front(ye, spec.n_states) != embedded_front(ype, spec.n_states) ? 1 : 0;
  }
  return out;
}

}  // namespace mixsim
