#include "megi/channel.hpp"

#include <cmath>
#include <limits>

namespace megi {

double path_gain(double distance, const SystemConfig& cfg) {
  if (distance < 1.0) distance = 1.0;  // BS co-location degenerate case
  return cfg.ref_gain * std::pow(distance, -cfg.pathloss_exponent);
}

double snr_of(double power, double gain, double bandwidth,
              const SystemConfig& cfg) {
  return power * gain / (cfg.noise_psd * bandwidth);
}

double link_rate(double power, double gain, double bandwidth,
                 const SystemConfig& cfg) {
  const double snr = snr_of(power, gain, bandwidth, cfg);
  return bandwidth * std::log2(1.0 + snr);
}

LinkBudget transmission(double bits, double rate, double power, double snr) {
  LinkBudget b;
  b.power = power;
  b.rate = rate;
  b.snr = snr;
  if (bits <= 0.0) {
    b.tx_time = 0.0;
    b.tx_energy = 0.0;
  } else if (rate <= 0.0) {
    b.tx_time = std::numeric_limits<double>::infinity();
    b.tx_energy = 0.0;  // nothing was sent
  } else {
    b.tx_time = bits / rate;
    b.tx_energy = power * b.tx_time;
  }
  return b;
}

double packet_error_probability(double snr, double bits) {
  if (bits <= 0.0) return 0.0;
  const double ber = 0.5 * std::exp(-snr / 2.0);
  // 1-(1-ber)^bits via log1p/expm1 to stay accurate for tiny ber.
  return -std::expm1(bits * std::log1p(-ber));
}

bool packet_error(double snr, double bits, RngStream& rng) {
  if (bits <= 0.0) return false;
  return rng.uniform() < packet_error_probability(snr, bits);
}

double fading_multiplier(RngStream& rng) {
  double u;
  do {
    u = rng.uniform();
  } while (u <= 0.0);
  return -std::log(u);
}

}  // namespace megi
