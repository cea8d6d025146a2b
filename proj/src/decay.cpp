#include "mixsim/decay.hpp"

#include <cmath>
#include <stdexcept>

namespace mixsim {

Tail Tail::geometric(double coef, double ratio) {
  if (coef < 0) throw std::invalid_argument("Tail: negative coefficient");
  if (ratio < 0 || ratio >= 1) throw std::invalid_argument("Tail: geometric ratio must lie in [0,1)");
  return Tail{TailKind::geometric, coef, ratio, 0};
}

Tail Tail::power(double coef, double exponent) {
  if (coef < 0) throw std::invalid_argument("Tail: negative coefficient");
  if (exponent <= 0) throw std::invalid_argument("Tail: power exponent must be positive");
  return Tail{TailKind::power, coef, 0, exponent};
}

DecaySequence DecaySequence::from_values(std::vector<double> values, Tail tail, int first_index) {
  if (first_index < 0) throw std::invalid_argument("DecaySequence: negative first index");
  for (double v : values)
    if (!(v >= 0)) throw std::invalid_argument("DecaySequence: values must be nonnegative");
  DecaySequence s;
  s.first_index_ = first_index;
  s.values_ = std::move(values);
  s.tail_ = tail;
  return s;
}

DecaySequence DecaySequence::zeros(int first_index) {
  return from_values({}, Tail::zero(), first_index);
}

DecaySequence DecaySequence::geometric(double coef, double ratio, int first_index) {
  return from_values({}, Tail::geometric(coef, ratio), first_index);
}

double DecaySequence::at(int i) const {
  if (i < first_index_)
    throw std::out_of_range("DecaySequence: index below first_index");
  if (i < table_end()) return values_[std::size_t(i - first_index_)];
  switch (tail_.kind) {
    case TailKind::zero:
      return 0.0;
    case TailKind::geometric:
      return tail_.coef * std::pow(tail_.ratio, i);
    case TailKind::power:
      return tail_.coef * std::pow(double(i < 1 ? 1 : i), -tail_.exponent);
    case TailKind::none:
      throw std::domain_error("DecaySequence: index past table and no tail declared");
  }
  return 0.0;
}

bool DecaySequence::summable() const {
  switch (tail_.kind) {
    case TailKind::zero:
      return true;
    case TailKind::geometric:
      return tail_.ratio < 1.0;
    case TailKind::power:
      return tail_.exponent > 1.0;
    case TailKind::none:
      return false;
  }
  return false;
}

double DecaySequence::tail_sum_from(int j) const {
  int start = j < first_index_ ? first_index_ : j;
  double s = 0.0;
  int te = table_end();
  for (int i = start; i < te; ++i) s += values_[std::size_t(i - first_index_)];
  int from = start > te ? start : te;
  switch (tail_.kind) {
    case TailKind::zero:
      return s;
    case TailKind::geometric:
      if (tail_.ratio == 0.0) return s;
      return s + tail_.coef * std::pow(tail_.ratio, from) / (1.0 - tail_.ratio);
    case TailKind::power: {
      if (tail_.exponent <= 1.0)
        throw std::domain_error("DecaySequence: power tail with exponent <= 1 is not summable");
      double J = double(from < 1 ? 1 : from);
      // sum_{i>=J} c i^-k <= c (J^-k + J^{1-k}/(k-1))
      return s + tail_.coef * (std::pow(J, -tail_.exponent) +
                               std::pow(J, 1.0 - tail_.exponent) / (tail_.exponent - 1.0));
    }
    case TailKind::none:
      throw std::domain_error("DecaySequence: tail sum requested but no tail declared");
  }
  return s;
}

double DecaySequence::weighted_tail_sum_from(int j) const {
  int start = j < first_index_ ? first_index_ : j;
  double s = 0.0;
  int te = table_end();
  for (int i = start; i < te; ++i) s += double(i) * values_[std::size_t(i - first_index_)];
  int from = start > te ? start : te;
  switch (tail_.kind) {
    case TailKind::zero:
      return s;
    case TailKind::geometric: {
      if (tail_.ratio == 0.0) return s;
      double q = tail_.ratio, T = double(from);
      // sum_{i>=T} c i q^i = c q^T (T/(1-q) + q/(1-q)^2)
      return s + tail_.coef * std::pow(q, from) * (T / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)));
    }
    case TailKind::power: {
      if (tail_.exponent <= 2.0)
        throw std::domain_error("DecaySequence: weighted sum needs power exponent > 2");
      double J = double(from < 1 ? 1 : from);
      double k = tail_.exponent - 1.0;  // sum i * c i^-e = sum c i^-(e-1)
      return s + tail_.coef * (std::pow(J, -k) + std::pow(J, 1.0 - k) / (k - 1.0));
    }
    case TailKind::none:
      throw std::domain_error("DecaySequence: tail sum requested but no tail declared");
  }
  return s;
}

std::optional<GeometricEnvelope> DecaySequence::geometric_envelope() const {
  switch (tail_.kind) {
    case TailKind::zero:
      return GeometricEnvelope{0.0, 0.0, table_end()};
    case TailKind::geometric:
      return GeometricEnvelope{tail_.coef, tail_.ratio, table_end()};
    default:
      return std::nullopt;
  }
}

}  // namespace mixsim
