// megisim -- wireless link model.
//
// Log-distance path loss, Shannon rate, transmission time/energy accounting
// and an SNR-driven packet corruption process. Corrupted transfers are
// detected by CRC at the receiver and retried once.

#ifndef MEGI_CHANNEL_HPP
#define MEGI_CHANNEL_HPP

#include "megi/config.hpp"
#include "megi/rng.hpp"

namespace megi {

struct ChannelState {
  double distance = 1.0;   // m
  double gain = 0.0;       // pathloss x optional fading
  bool fading_enabled = false;
};

struct LinkBudget {
  double power = 0.0;      // W
  double rate = 0.0;       // b/s
  double tx_time = 0.0;    // s (infinite when the link is unreachable)
  double tx_energy = 0.0;  // J
  double snr = 0.0;
};

// ref_gain * distance^(-pathloss_exponent); distances below 1 m clamp to 1.
double path_gain(double distance, const SystemConfig& cfg);

// Shannon rate over `bandwidth`; power 0 yields rate 0.
double link_rate(double power, double gain, double bandwidth,
                 const SystemConfig& cfg);

double snr_of(double power, double gain, double bandwidth,
              const SystemConfig& cfg);

// Time and energy to push `bits` at `rate`. bits > 0 with rate 0 marks the
// link unreachable: tx_time becomes +inf (so the deadline check fails
// downstream) and no energy is spent.
LinkBudget transmission(double bits, double rate, double power, double snr);

// Bit-error rate 0.5*exp(-snr/2); the whole transfer is corrupted with
// probability 1-(1-ber)^bits. rng is the fading stream.
bool packet_error(double snr, double bits, RngStream& rng);

// Corruption probability alone (no draw), for tests and diagnostics.
double packet_error_probability(double snr, double bits);

// Unit-mean exponential fading multiplier, redrawn per task per link.
double fading_multiplier(RngStream& rng);

}  // namespace megi

#endif  // MEGI_CHANNEL_HPP
