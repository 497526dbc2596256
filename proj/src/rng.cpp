#include "megi/rng.hpp"

#include <cmath>

namespace megi {

namespace {

// Distinct salts keep the per-label streams decorrelated for any seed.
constexpr std::uint64_t kLabelSalt[] = {
    0x243f6a8885a308d3ULL,  // arrivals
    0x13198a2e03707344ULL,  // gating
    0xa4093822299f31d0ULL,  // fading
    0x082efa98ec4e6c89ULL,  // policy-init
    0x452821e638d01377ULL,  // rollout
};

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamLabel label)
    : state_(mix(seed ^ kLabelSalt[static_cast<std::uint64_t>(label)])) {}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  // Modulo bias is < 2^-53 for the menu sizes used here.
  return next_u64() % n;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

long long RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    long long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }
  const long long draw =
      std::llround(mean + std::sqrt(mean) * normal());
  return draw < 0 ? 0 : draw;
}

}  // namespace megi
