#include "megi/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "megi/crc32.hpp"
#include "megi/rng.hpp"

namespace megi {

using nlohmann::json;

namespace {

void require(std::vector<std::string>& errs, bool cond, const std::string& msg) {
  if (!cond) errs.push_back(msg);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

int complexity_band(double complexity) {
  int b = static_cast<int>(complexity * kComplexityBands);
  return std::clamp(b, 0, kComplexityBands - 1);
}

ConfigResult validate_config(SystemConfig raw) {
  ConfigResult out;
  auto& errs = out.errors;

  require(errs, raw.n_devices >= 1, "n_devices: must be >= 1");
  require(errs, raw.area_side > 0, "area_side: must be > 0");
  require(errs, raw.p_max > 0, "p_max: must be > 0");
  require(errs, raw.bw_downlink > 0, "bw_downlink: must be > 0");
  require(errs, raw.bw_uplink > 0, "bw_uplink: must be > 0");
  require(errs, raw.noise_psd > 0, "noise_psd: must be > 0");
  require(errs, raw.pathloss_exponent > 0, "pathloss_exponent: must be > 0");
  require(errs, raw.ref_gain > 0, "ref_gain: must be > 0");
  require(errs, raw.slot_duration > 0, "slot_duration: must be > 0");
  require(errs, raw.n_slots >= 1, "n_slots: must be >= 1");
  require(errs, raw.token_cap >= 1, "token_cap: must be >= 1");
  require(errs, raw.mean_len > 0, "mean_len: must be > 0");
  require(errs, raw.tasks_per_slot_mean > 0, "tasks_per_slot_mean: must be > 0");
  require(errs, raw.deadline > 0, "deadline: must be > 0");
  require(errs, raw.bits_per_token > 0, "bits_per_token: must be > 0");
  require(errs, in_unit(raw.cot_payload_factor),
          "cot_payload_factor: must be in [0,1]");
  require(errs, raw.flops_per_token_expert > 0,
          "flops_per_token_expert: must be > 0");
  require(errs, raw.flops_per_token_dense >= 0,
          "flops_per_token_dense: must be >= 0");
  require(errs, raw.kappa_device > 0, "kappa_device: must be > 0");
  require(errs, raw.kappa_bs > 0, "kappa_bs: must be > 0");
  require(errs, raw.device_tflops > 0, "device_tflops: must be > 0");
  require(errs, raw.bs_tflops > 0, "bs_tflops: must be > 0");
  require(errs, raw.device_mem > 0, "device_mem: must be > 0");
  require(errs, raw.expert_mem > 0, "expert_mem: must be > 0");
  require(errs, raw.expert_mem <= raw.device_mem,
          "expert_mem: exceeds device_mem, device cannot host its expert");
  require(errs, in_unit(raw.q_hi), "q_hi: must be in [0,1]");
  require(errs, in_unit(raw.q_span), "q_span: must be in [0,1]");
  require(errs, raw.rho_k > 0 && raw.rho_k < 1, "rho_k: must be in (0,1)");
  require(errs, raw.rho_d > 0 && raw.rho_d < 1, "rho_d: must be in (0,1)");
  require(errs, in_unit(raw.theta), "theta: must be in [0,1]");
  require(errs, raw.e_ref > 0, "e_ref: must be > 0");
  require(errs, raw.lambda_lat >= 0, "lambda_lat: must be >= 0");
  require(errs, raw.lambda_acc >= 0, "lambda_acc: must be >= 0");
  require(errs, raw.d_max >= 0, "d_max: must be >= 0");
  require(errs, !raw.k_choices.empty(), "k_choices: must be nonempty");
  for (int k : raw.k_choices)
    require(errs, k >= 1 && k <= raw.n_devices,
            "k_choices: entry " + std::to_string(k) +
                " outside {1.." + std::to_string(raw.n_devices) + "}");
  require(errs, !raw.power_levels.empty(), "power_levels: must be nonempty");
  for (double p : raw.power_levels)
    require(errs, p > 0 && p <= 1.0,
            "power_levels: fractions must be in (0,1]");

  if (raw.flops_per_token_dense == 0.0)
    raw.flops_per_token_dense = raw.n_devices * raw.flops_per_token_expert;

  if (raw.device_positions.empty()) {
    // Topology draws come from a salted sub-seed so they can never collide
    // with the runtime streams.
    RngStream rng(raw.seed ^ 0x746f706fULL, StreamLabel::kArrivals);
    raw.device_positions.reserve(raw.n_devices);
    for (int i = 0; i < raw.n_devices; ++i)
      raw.device_positions.push_back(
          {rng.uniform(0.0, raw.area_side), rng.uniform(0.0, raw.area_side)});
  } else {
    require(errs,
            static_cast<int>(raw.device_positions.size()) == raw.n_devices,
            "device_positions: size must equal n_devices");
  }
  for (const auto& p : raw.device_positions)
    require(errs,
            p[0] >= 0 && p[0] <= raw.area_side && p[1] >= 0 &&
                p[1] <= raw.area_side,
            "device_positions: position outside the area square");
  require(errs,
          raw.bs_position[0] >= 0 && raw.bs_position[0] <= raw.area_side &&
              raw.bs_position[1] >= 0 && raw.bs_position[1] <= raw.area_side,
          "bs_position: outside the area square");

  out.cfg = std::move(raw);
  return out;
}

namespace {

// One entry per recognized key; keeps parse and serialize in sync.
template <typename F>
void for_each_field(SystemConfig& c, F&& f) {
  f("n_devices", c.n_devices);
  f("area_side", c.area_side);
  f("p_max", c.p_max);
  f("bw_downlink", c.bw_downlink);
  f("bw_uplink", c.bw_uplink);
  f("noise_psd", c.noise_psd);
  f("pathloss_exponent", c.pathloss_exponent);
  f("ref_gain", c.ref_gain);
  f("fading_enabled", c.fading_enabled);
  f("slot_duration", c.slot_duration);
  f("n_slots", c.n_slots);
  f("token_cap", c.token_cap);
  f("mean_len", c.mean_len);
  f("tasks_per_slot_mean", c.tasks_per_slot_mean);
  f("deadline", c.deadline);
  f("bits_per_token", c.bits_per_token);
  f("cot_payload_factor", c.cot_payload_factor);
  f("flops_per_token_expert", c.flops_per_token_expert);
  f("flops_per_token_dense", c.flops_per_token_dense);
  f("kappa_device", c.kappa_device);
  f("kappa_bs", c.kappa_bs);
  f("device_tflops", c.device_tflops);
  f("bs_tflops", c.bs_tflops);
  f("device_mem", c.device_mem);
  f("expert_mem", c.expert_mem);
  f("q_hi", c.q_hi);
  f("q_span", c.q_span);
  f("rho_k", c.rho_k);
  f("rho_d", c.rho_d);
  f("theta", c.theta);
  f("e_ref", c.e_ref);
  f("lambda_lat", c.lambda_lat);
  f("lambda_acc", c.lambda_acc);
  f("d_max", c.d_max);
}

}  // namespace

ConfigResult parse_config_json(const std::string& text) {
  ConfigResult out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    out.errors.push_back(std::string("config: JSON parse error: ") + e.what());
    return out;
  }
  if (!j.is_object()) {
    out.errors.push_back("config: top level must be a JSON object");
    return out;
  }

  SystemConfig& c = out.cfg;
  auto& errs = out.errors;

  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    bool known = false;
    try {
      for_each_field(c, [&](const char* name, auto& field) {
        if (key == name) {
          it.value().get_to(field);
          known = true;
        }
      });
      if (key == "bs_position") {
        it.value().get_to(c.bs_position);
        known = true;
      } else if (key == "device_positions") {
        it.value().get_to(c.device_positions);
        known = true;
      } else if (key == "k_choices") {
        it.value().get_to(c.k_choices);
        known = true;
      } else if (key == "power_levels") {
        it.value().get_to(c.power_levels);
        known = true;
      } else if (key == "seed") {
        c.seed = it.value().get<std::uint64_t>();
        known = true;
      }
    } catch (const json::exception& e) {
      errs.push_back(key + ": " + e.what());
      known = true;
    }
    if (!known) errs.push_back(key + ": unknown config key");
  }

  if (const char* env = std::getenv("MEGI_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0')
      c.seed = v;
    else
      errs.push_back("MEGI_SEED: not a valid integer");
  }
  return out;
}

ConfigResult load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigResult out;
    out.errors.push_back("config: cannot open " + path);
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ConfigResult parsed = parse_config_json(ss.str());
  if (!parsed.ok()) return parsed;
  return validate_config(std::move(parsed.cfg));
}

std::string canonical_json(const SystemConfig& cfg, bool include_seed) {
  json j;
  for_each_field(const_cast<SystemConfig&>(cfg),
                 [&](const char* name, auto& field) { j[name] = field; });
  j["bs_position"] = cfg.bs_position;
  j["device_positions"] = cfg.device_positions;
  j["k_choices"] = cfg.k_choices;
  j["power_levels"] = cfg.power_levels;
  if (include_seed) j["seed"] = cfg.seed;
  return j.dump();  // nlohmann sorts object keys
}

std::string config_hash(const SystemConfig& cfg) {
  const std::uint32_t h = crc32(canonical_json(cfg, /*include_seed=*/false));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", h);
  return std::string(buf);
}

}  // namespace megi
