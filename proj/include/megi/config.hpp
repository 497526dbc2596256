// megisim -- system configuration.
//
// SystemConfig mirrors the JSON config file (snake_case keys, unknown keys
// rejected). validate() fills defaults, generates device positions from the
// seed when absent, and reports every violated invariant by field name.
//
// Observation normalization conventions (used by env):
//   task length   -> length / token_cap
//   channel gain  -> log10(gain/gain_floor) / log10(ref_gain/gain_floor),
//                    gain_floor = pathloss at the area diagonal, clamped to [0,1]
//   compute budget-> remaining slot FLOPs / (device_tflops * slot_duration)
//   affinity      -> raw gating-logit bias (already O(1))

#ifndef MEGI_CONFIG_HPP
#define MEGI_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace megi {

// Complexity is quantized into this many affinity bands.
inline constexpr int kComplexityBands = 4;

struct SystemConfig {
  // Topology
  int n_devices = 15;
  double area_side = 1000.0;                    // m
  std::array<double, 2> bs_position{500.0, 500.0};
  std::vector<std::array<double, 2>> device_positions;  // generated if empty

  // Radio
  double p_max = 0.01;                // W
  double bw_downlink = 20e6;          // Hz
  double bw_uplink = 1e6;             // Hz
  double noise_psd = 3.98e-21;        // W/Hz (-174 dBm/Hz)
  double pathloss_exponent = 2.2;
  double ref_gain = 1e-3;             // power ratio at 1 m
  bool fading_enabled = false;        // unit-mean exponential, per task per link

  // Time base and workload
  double slot_duration = 2.0;         // s
  int n_slots = 1000;
  int token_cap = 1024;
  double mean_len = 512.0;            // Poisson mean, tokens
  double tasks_per_slot_mean = 2.0;
  double deadline = 2.0;              // s

  // Cost model
  double bits_per_token = 32768.0;    // 2048-dim 16-bit embeddings
  double cot_payload_factor = 0.25;   // extra uplink bits per CoT step
  double flops_per_token_expert = 1e9;
  double flops_per_token_dense = 0.0; // 0 -> n_devices * flops_per_token_expert
  double kappa_device = 5e-12;        // J/FLOP
  double kappa_bs = 1e-11;            // J/FLOP
  double device_tflops = 2e12;        // FLOP/s
  double bs_tflops = 7.488e15;        // FLOP/s, 24 GPUs aggregate
  double device_mem = 32e9;           // bytes
  double expert_mem = 8e9;            // bytes

  // Quality model
  double q_hi = 0.9;
  double q_span = 0.3;
  double rho_k = 0.9;
  double rho_d = 0.75;
  double theta = 0.85;

  // Reward weights
  double e_ref = 10.0;                // J
  double lambda_lat = 1.0;
  double lambda_acc = 1.0;

  // Action menus
  std::vector<int> k_choices{1, 2, 3};
  int d_max = 4;
  std::vector<double> power_levels{0.25, 0.5, 0.75, 1.0};

  std::uint64_t seed = 1;
};

struct ConfigResult {
  SystemConfig cfg;
  std::vector<std::string> errors;  // empty means valid
  bool ok() const { return errors.empty(); }
};

// Checks every invariant and fills derived defaults (dense FLOPs/token,
// device positions). Returns the completed config or the error list.
ConfigResult validate_config(SystemConfig raw);

// Parses JSON text into a raw config. Unknown keys and type mismatches are
// reported as errors; MEGI_SEED, when set in the environment, overrides seed.
ConfigResult parse_config_json(const std::string& text);

// Convenience: read file, parse, validate.
ConfigResult load_config_file(const std::string& path);

// Canonical serialization (sorted keys, positions included). With
// include_seed=false this is the basis of config_hash(), so runs that differ
// only by seed share a hash.
std::string canonical_json(const SystemConfig& cfg, bool include_seed = true);

// CRC-32 of the canonical seedless JSON, as 8 hex digits.
std::string config_hash(const SystemConfig& cfg);

int complexity_band(double complexity);

}  // namespace megi

#endif  // MEGI_CONFIG_HPP
