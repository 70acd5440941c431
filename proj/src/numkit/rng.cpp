#include "fieldgen/numkit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::numkit {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Finalizer from SplitMix64 (Stafford mix13). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // 2*mix+1 keeps distinct stream ids on distinct odd increments.
  gamma_ = (mix64(stream_id ^ kGolden) << 1) | 1ULL;
  state_ = mix64(seed) ^ mix64(stream_id * 0xda942042e4dd58b5ULL + 1);
}

std::uint64_t RngStream::next_u64() {
  state_ += gamma_;
  return mix64(state_);
}

double RngStream::uniform01() {
  // 53 significant bits, offset by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double RngStream::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("RngStream::uniform: requires lo < hi");
  return lo + (hi - lo) * uniform01();
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::uniform_index: n must be > 0");
  // Rejection-free modulo is acceptable here: n is tiny relative to 2^64.
  return next_u64() % n;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void RngStream::fill_normal(Vec& out) {
  for (double& x : out) x = normal();
}

}  // namespace fieldgen::numkit
