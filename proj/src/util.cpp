#include "mixsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace mixsim {

int thread_count() {
  int hw = int(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  const char* cap = std::getenv("MIXSIM_THREADS");
  if (cap != nullptr) {
    int c = std::atoi(cap);
    if (c >= 1 && c < hw) hw = c;
    if (c >= 1 && hw < 1) hw = c;
  }
  return hw;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  int workers = thread_count();
  if (workers <= 1 || n == 1) {
    fn(0, n);
    return;
  }
  std::int64_t chunks = std::min<std::int64_t>(workers, n);
  std::int64_t base = n / chunks, rem = n % chunks;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors;
  errors.resize(std::size_t(chunks));
  std::int64_t begin = 0;
  for (std::int64_t c = 0; c < chunks; ++c) {
    std::int64_t len = base + (c < rem ? 1 : 0);
    pool.emplace_back(
        [&fn, &errors, c](std::int64_t b, std::int64_t e) {
          try {
            fn(b, e);
          } catch (...) {
            errors[std::size_t(c)] = std::current_exception();
          }
        },
        begin, begin + len);
    begin += len;
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return std::string(buf);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

double RunningStat::se() const {
  if (n < 2) return 0.0;
  double m = mean();
  double var = (sum_sq - double(n) * m * m) / double(n - 1);
  if (var < 0) var = 0;
  return std::sqrt(var / double(n));
}

double proportion_se(double p_hat, std::int64_t n) {
  if (n <= 0) return 0.0;
  double v = p_hat * (1.0 - p_hat);
  if (v < 0) v = 0;
  return std::sqrt(v / double(n));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("normal_quantile: u must be in (0,1)");
  // Acklam's rational approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (u < plow) {
    double q = std::sqrt(-2 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (u <= phigh) {
    double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log(1 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  // one Halley step against the exact CDF
  double e = normal_cdf(x) - u;
  double pdf = 0.3989422804014326779 * std::exp(-0.5 * x * x);
  if (pdf > 0) {
    double w = e / pdf;
    x -= w / (1 + 0.5 * x * w);
  }
  return x;
}

}  // namespace mixsim
