#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "megi/channel.hpp"
#include "megi/crc32.hpp"

using namespace megi;

namespace {
SystemConfig defaults() { return validate_config(SystemConfig{}).cfg; }
}  // namespace

TEST_CASE("path gain at the reference distance") {
  const SystemConfig cfg = defaults();
  CHECK(path_gain(1.0, cfg) == doctest::Approx(1e-3));
  // sub-metre distances clamp to the reference
  CHECK(path_gain(0.5, cfg) == doctest::Approx(1e-3));
}

TEST_CASE("log-distance evaluation at 100 m with exponent 3.5") {
  SystemConfig cfg = defaults();
  cfg.pathloss_exponent = 3.5;
  // 1e-3 * 100^-3.5 evaluated independently
  CHECK(path_gain(100.0, cfg) == doctest::Approx(1e-10).epsilon(1e-9));
}

TEST_CASE("shannon rate basics") {
  const SystemConfig cfg = defaults();
  // snr arranged to equal 3 -> rate = 2 * bandwidth
  const double bw = 1e6;
  const double gain = 3.0 * cfg.noise_psd * bw / 0.01;
  CHECK(link_rate(0.01, gain, bw, cfg) == doctest::Approx(2.0 * bw));
  CHECK(link_rate(0.0, gain, bw, cfg) == 0.0);
}

TEST_CASE("hand-evaluated rate for the reference link") {
  const SystemConfig cfg = defaults();
  const double snr = snr_of(0.01, 1e-10, 2e7, cfg);
  CHECK(snr == doctest::Approx(12.5628).epsilon(1e-3));
  CHECK(link_rate(0.01, 1e-10, 2e7, cfg) ==
        doctest::Approx(7.523e7).epsilon(1e-3));
}

TEST_CASE("rate grows with power and with gain") {
  const SystemConfig cfg = defaults();
  double prev = 0.0;
  for (double p : {0.001, 0.002, 0.005, 0.01}) {
    const double r = link_rate(p, 1e-10, 2e7, cfg);
    CHECK(r > prev);
    prev = r;
  }
  prev = 0.0;
  for (double g : {1e-12, 1e-11, 1e-10, 1e-9}) {
    const double r = link_rate(0.01, g, 2e7, cfg);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("transmission arithmetic and the energy identity") {
  const LinkBudget b = transmission(2e6, 2e6, 0.01, 5.0);
  CHECK(b.tx_time == doctest::Approx(1.0));
  CHECK(b.tx_energy == doctest::Approx(0.01));

  const LinkBudget empty = transmission(0.0, 2e6, 0.01, 5.0);
  CHECK(empty.tx_time == 0.0);
  CHECK(empty.tx_energy == 0.0);

  // 1024 tokens x 32768 bits at the reference-link rate
  const LinkBudget big = transmission(3.3554432e7, 7.523e7, 0.01, 12.56);
  CHECK(big.tx_time == doctest::Approx(0.446).epsilon(1e-2));

  RngStream rng(1, StreamLabel::kFading);
  for (int i = 0; i < 2000; ++i) {
    const double bits = rng.uniform(1.0, 1e8);
    const double rate = rng.uniform(1e3, 1e9);
    const double power = rng.uniform(1e-4, 1e-1);
    const LinkBudget lb = transmission(bits, rate, power, 1.0);
    REQUIRE(std::abs(lb.tx_energy - power * lb.tx_time) <=
            1e-12 * std::max(1.0, std::abs(lb.tx_energy)));
  }
}

TEST_CASE("tx time falls as rate rises") {
  double prev = 1e30;
  for (double rate : {1e5, 1e6, 1e7, 1e8}) {
    const double t = transmission(1e6, rate, 0.01, 1.0).tx_time;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("unreachable link marks time infinite without spending energy") {
  const LinkBudget b = transmission(1e6, 0.0, 0.01, 0.0);
  CHECK(std::isinf(b.tx_time));
  CHECK(b.tx_energy == 0.0);
}

TEST_CASE("crc32 standard vectors") {
  CHECK(crc32(std::string_view("123456789")) == 0xCBF43926u);
  CHECK(crc32(std::string_view("")) == 0x00000000u);
}

TEST_CASE("crc32 detects every single-bit flip") {
  RngStream rng(77, StreamLabel::kFading);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = 1 + rng.next_below(256);
    std::vector<unsigned char> payload(len);
    for (auto& b : payload) b = static_cast<unsigned char>(rng.next_below(256));
    const std::uint32_t ref = crc32(payload.data(), payload.size());
    const std::size_t bit = rng.next_below(len * 8);
    payload[bit / 8] ^= static_cast<unsigned char>(1u << (bit % 8));
    CHECK(crc32(payload.data(), payload.size()) != ref);
  }
}

TEST_CASE("packet corruption edge cases") {
  RngStream rng(5, StreamLabel::kFading);
  CHECK_FALSE(packet_error(0.1, 0.0, rng));          // empty packet
  CHECK(packet_error_probability(1e9, 1e6) == 0.0);  // snr -> inf
  CHECK(packet_error_probability(12.56, 3.36e7) == doctest::Approx(1.0));
}

// Monte-Carlo against the closed form at a mid-range operating point.
TEST_CASE("packet corruption frequency matches the formula") {
  const double snr = 30.0, bits = 1000.0;
  const double p = packet_error_probability(snr, bits);
  REQUIRE(p > 0.0);
  REQUIRE(p < 1.0);
  RngStream rng(123, StreamLabel::kFading);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (packet_error(snr, bits, rng)) ++hits;
  const double sigma = std::sqrt(n * p * (1.0 - p));
  CHECK(std::abs(hits - n * p) <= 3.0 * sigma + 1.0);
}

TEST_CASE("fading multiplier has unit mean") {
  RngStream rng(9, StreamLabel::kFading);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += fading_multiplier(rng);
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
}
