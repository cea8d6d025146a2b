#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mixsim {

// Number of worker threads to use. Defaults to the hardware count and can be
// capped with the MIXSIM_THREADS environment variable (>= 1).
int thread_count();

// Runs fn(begin, end) over a partition of [0, n). Chunks are assigned
// deterministically; callers must write only to disjoint, index-addressed
// slots so the result is identical at any thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

// Shortest decimal string that round-trips to the same double. Used for CSV
// output so that repeated runs are byte-identical.
std::string format_double(double v);

// FNV-1a 64-bit, hex-encoded. Content hash for configs in run reports.
std::string fnv1a_hex(const std::string& bytes);

struct RunningStat {
  std::int64_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) { ++n; sum += x; sum_sq += x * x; }
  double mean() const { return n > 0 ? sum / double(n) : 0.0; }
  // standard error of the mean
  double se() const;
};

// Standard error of a Bernoulli proportion p_hat over n trials.
double proportion_se(double p_hat, std::int64_t n);

// Standard normal CDF and its inverse (rational approximation plus one
// Halley refinement; accurate to ~1e-15 well inside (0,1)).
double normal_cdf(double x);
double normal_quantile(double u);

}  // namespace mixsim
