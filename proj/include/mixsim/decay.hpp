#pragma once

#include <optional>
#include <vector>

namespace mixsim {

// Nonnegative sequence indexed from first_index, given by an explicit table
// plus a declared analytic tail. Infinite-sum calculators refuse sequences
// whose tail they cannot certify, rather than silently truncating.
enum class TailKind { none, zero, geometric, power };

struct Tail {
  TailKind kind = TailKind::none;
  double coef = 0.0;      // geometric: coef * ratio^i ; power: coef * i^-exponent
  double ratio = 0.0;     // geometric only, in [0, 1)
  double exponent = 0.0;  // power only, > 0

  static Tail none() { return Tail{}; }
  static Tail zero() { return Tail{TailKind::zero, 0, 0, 0}; }
  static Tail geometric(double coef, double ratio);
  static Tail power(double coef, double exponent);
};

struct GeometricEnvelope {
  double coef = 0.0;
  double ratio = 0.0;
  int from = 0;  // value(i) <= coef * ratio^i for all i >= from
};

class DecaySequence {
 public:
  DecaySequence() = default;
  static DecaySequence from_values(std::vector<double> values, Tail tail, int first_index = 0);
  static DecaySequence zeros(int first_index = 0);
  // coef * ratio^i for every i >= first_index
  static DecaySequence geometric(double coef, double ratio, int first_index = 0);

  double at(int i) const;  // throws below first_index or past table when tail is none
  int first_index() const { return first_index_; }
  // first index covered by the tail formula rather than the table
  int table_end() const { return first_index_ + int(values_.size()); }
  const Tail& tail() const { return tail_; }
  bool summable() const;

  // sum_{i >= max(j, first_index)} value(i); exact for zero/geometric tails,
  // a certified upper bound for power tails. Throws for kind none (when the
  // sum extends past the table) or non-summable tails.
  double tail_sum_from(int j) const;

  // sum_{i >= max(j, first_index)} i * value(i), same certification rules
  // (power tails need exponent > 2).
  double weighted_tail_sum_from(int j) const;

  // Envelope value(i) <= coef * ratio^i valid for all i >= from, if one is
  // implied by the declared tail (geometric or zero).
  std::optional<GeometricEnvelope> geometric_envelope() const;

 private:
  int first_index_ = 0;
  std::vector<double> values_;
  Tail tail_;
};

}  // namespace mixsim
