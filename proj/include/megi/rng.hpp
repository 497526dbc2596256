// megisim -- seeded random streams.
//
// One 64-bit generator (splitmix64) with fixed per-label offsets so that
// the arrivals, gating, fading, policy-init and rollout streams never
// interact: consuming one stream cannot perturb another.

#ifndef MEGI_RNG_HPP
#define MEGI_RNG_HPP

#include <cstdint>

namespace megi {

enum class StreamLabel : std::uint64_t {
  kArrivals = 0,
  kGating = 1,
  kFading = 2,
  kPolicyInit = 3,
  kRollout = 4,
};

class RngStream {
 public:
  RngStream() : RngStream(0, StreamLabel::kArrivals) {}
  RngStream(std::uint64_t seed, StreamLabel label);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Marsaglia's polar method (one spare cached).
  double normal();

  // Poisson draw: exact inversion below mean 30, rounded normal
  // approximation (clamped >= 0) above.
  long long poisson(double mean);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace megi

#endif  // MEGI_RNG_HPP
