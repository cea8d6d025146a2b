#pragma once

#include <cstdint>
#include <vector>

namespace mixsim {

// Counter-based pseudo-random stream. A stream is identified by (seed,
// stream_id); draws are a pure function of (seed, stream_id, counter), so
// replicated simulations can hand out disjoint stream_ids and produce
// identical output regardless of scheduling. The generator applies a
// SplitMix64-style finalizer to key + counter * gamma with a per-stream odd
// gamma.
class RngStream {
 public:
  RngStream() = default;

  static RngStream make(std::uint64_t seed, std::uint64_t stream_id);

  // Independent stream derived from (seed, stream_id, sub_id). Lazy
  // generators hand one substream to each time index so materialization
  // order cannot change the values drawn.
  RngStream substream(std::uint64_t sub_id) const;

  std::uint64_t next_u64();

  // uniform on [0, 1), 53-bit mantissa
  double next_uniform();
  // uniform on the open interval (0, 1); safe for log/logit transforms
  double next_open_uniform();
  // standard normal via Box-Muller (consumes two uniforms per value; no
  // cached spare, keeping the draw count a pure function of calls)
  double next_gaussian();
  // standard Gumbel: -log(-log U)
  double next_gumbel();
  // index into a probability vector by inverse CDF; probs need not be
  // perfectly normalized, the last cell absorbs rounding
  int next_categorical(const std::vector<double>& probs);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t gamma_ = 1;
  std::uint64_t counter_ = 0;
};

}  // namespace mixsim
