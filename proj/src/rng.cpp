#include "mixsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mixsim {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t mix64_alt(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

RngStream RngStream::make(std::uint64_t seed, std::uint64_t stream_id) {
  RngStream s;
  s.seed_ = seed;
  s.stream_id_ = stream_id;
  s.key_ = mix64(seed ^ mix64_alt(stream_id + kGolden));
  s.gamma_ = mix64_alt(stream_id ^ mix64(seed + kGolden)) | 1ULL;
  s.counter_ = 0;
  return s;
}

RngStream RngStream::substream(std::uint64_t sub_id) const {
  std::uint64_t combined = mix64(stream_id_ * kGolden ^ mix64_alt(sub_id + kGolden));
  return make(seed_, combined);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * gamma_);
}

double RngStream::next_uniform() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open_uniform() {
  return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::next_gaussian() {
  double u1 = next_open_uniform();
  double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

double RngStream::next_gumbel() {
  return -std::log(-std::log(next_open_uniform()));
}

int RngStream::next_categorical(const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("next_categorical: empty probability vector");
  double u = next_uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return int(i);
  }
  return int(probs.size()) - 1;
}

}  // namespace mixsim
