#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "megi/compute.hpp"
#include "megi/quality.hpp"

using namespace megi;

namespace {

SystemConfig defaults() { return validate_config(SystemConfig{}).cfg; }

ExpertProfile expert_of(const SystemConfig& cfg) {
  ExpertProfile e;
  e.flops_per_token = cfg.flops_per_token_expert;
  e.mem_footprint = cfg.expert_mem;
  return e;
}

DeviceProfile device_of(const SystemConfig& cfg) {
  DeviceProfile d;
  d.tflops = cfg.device_tflops;
  d.mem = cfg.device_mem;
  d.expert = expert_of(cfg);
  return d;
}

// Brute-force minimum satisfying depth, independent of the closed form.
int brute_min_depth(double c, int k, const SystemConfig& cfg, int limit) {
  for (int d = 0; d <= limit; ++d)
    if (quality_score(c, k, d, cfg) >= cfg.theta) return d;
  return -1;
}

}  // namespace

TEST_CASE("forward cost arithmetic") {
  const SystemConfig cfg = defaults();
  const ExpertProfile e = expert_of(cfg);

  const ForwardCost zero = forward_cost(0, 3, e, cfg);
  CHECK(zero.flops == 0.0);
  CHECK(zero.output_bits == 0.0);

  const ForwardCost base = forward_cost(100, 0, e, cfg);
  CHECK(base.flops == doctest::Approx(1e11));
  CHECK(base.output_bits == doctest::Approx(3.2768e6));
  CHECK(base.passes == 1);

  const ForwardCost deep = forward_cost(100, 2, e, cfg);
  CHECK(deep.flops == doctest::Approx(3.0 * base.flops));
  CHECK(deep.output_bits == doctest::Approx(1.5 * base.output_bits));
  CHECK(deep.passes == 3);
}

TEST_CASE("cost is linear in tokens and passes, monotone in depth") {
  const SystemConfig cfg = defaults();
  const ExpertProfile e = expert_of(cfg);
  const ForwardCost one = forward_cost(7, 0, e, cfg);
  for (int mult : {2, 3, 10}) {
    const ForwardCost many = forward_cost(7 * mult, 0, e, cfg);
    CHECK(many.flops == doctest::Approx(mult * one.flops));
  }
  double prev_flops = -1.0, prev_bits = -1.0;
  for (int d = 0; d <= 6; ++d) {
    const ForwardCost c = forward_cost(50, d, e, cfg);
    CHECK(c.flops >= prev_flops);
    CHECK(c.output_bits >= prev_bits);
    prev_flops = c.flops;
    prev_bits = c.output_bits;
  }
}

TEST_CASE("device execution latency and energy") {
  const SystemConfig cfg = defaults();
  const DeviceProfile dev = device_of(cfg);
  ForwardCost c;
  c.flops = 1e11;
  const auto [lat, energy] = execute_on_device(c, dev, cfg);
  CHECK(lat == doctest::Approx(0.05));     // 1e11 / 2e12
  CHECK(energy == doctest::Approx(0.5));   // 5e-12 * 1e11

  c.flops = 0.0;
  const auto [lat0, energy0] = execute_on_device(c, dev, cfg);
  CHECK(lat0 == 0.0);
  CHECK(energy0 == 0.0);
}

TEST_CASE("dense execution at the BS is the energy-heavy path") {
  const SystemConfig cfg = defaults();
  // 1024 tokens x 1.5e10 FLOPs/token at kappa_bs = 1e-11
  const auto [lat, energy] = execute_at_bs(1024, cfg);
  CHECK(energy == doctest::Approx(153.6));
  CHECK(lat == doctest::Approx(1024.0 * 1.5e10 / 7.488e15));
}

TEST_CASE("quality base cases") {
  const SystemConfig cfg = defaults();
  CHECK(quality_score(0.0, 1, 0, cfg) == doctest::Approx(0.9));
  CHECK(quality_score(1.0, 1, 2, cfg) == doctest::Approx(0.775));
  // geometric decay saturates toward 1
  CHECK(quality_score(1.0, 1, 60, cfg) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("verdict uses a >= threshold rule") {
  const SystemConfig cfg = defaults();
  CHECK(satisfied(0.9, cfg).satisfied);
  CHECK(satisfied(0.85, cfg).satisfied);  // boundary convention
  CHECK_FALSE(satisfied(0.8499999, cfg).satisfied);
}

TEST_CASE("quality is monotone in k and d, antitone in complexity") {
  const SystemConfig cfg = defaults();
  for (double c : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (int k = 1; k <= 3; ++k) {
      double prev = -1.0;
      for (int d = 0; d <= 10; ++d) {
        const double s = quality_score(c, k, d, cfg);
        REQUIRE(s >= prev);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);
        prev = s;
      }
    }
    for (int d = 0; d <= 6; ++d) {
      double prev = -1.0;
      for (int k = 1; k <= 5; ++k) {
        const double s = quality_score(c, k, d, cfg);
        REQUIRE(s >= prev);
        prev = s;
      }
    }
  }
  for (int k = 1; k <= 3; ++k)
    for (int d = 0; d <= 6; ++d) {
      double prev = 2.0;
      for (double c : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double s = quality_score(c, k, d, cfg);
        REQUIRE(s <= prev);
        prev = s;
      }
    }
}

TEST_CASE("closed-form minimum depth equals brute force on the band grid") {
  const SystemConfig cfg = defaults();
  const double band_centers[] = {0.125, 0.375, 0.625, 0.875};
  for (double c : band_centers)
    for (int k = 1; k <= 3; ++k)
      CHECK(min_satisfying_depth(c, k, cfg, 10) ==
            brute_min_depth(c, k, cfg, 10));
}

TEST_CASE("the hardest single-expert task needs depth 4") {
  const SystemConfig cfg = defaults();
  CHECK(brute_min_depth(1.0, 1, cfg, 10) == 4);
  CHECK(min_satisfying_depth(1.0, 1, cfg, 10) == 4);
}
