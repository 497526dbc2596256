#include "megi/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace megi {

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kDenseNoCot: return "dense_nocot";
    case SchemeId::kMoeNoCot: return "moe_nocot";
    case SchemeId::kMoeFixedCot: return "moe_fixed_cot";
    case SchemeId::kMoeDynamic: return "moe_dynamic";
  }
  throw std::logic_error("scheme_name: bad id");
}

std::optional<SchemeId> scheme_from_name(const std::string& name) {
  if (name == "dense_nocot") return SchemeId::kDenseNoCot;
  if (name == "moe_nocot") return SchemeId::kMoeNoCot;
  if (name == "moe_fixed_cot") return SchemeId::kMoeFixedCot;
  if (name == "moe_dynamic") return SchemeId::kMoeDynamic;
  return std::nullopt;
}

namespace {

int index_of_k(const SystemConfig& cfg, int k) {
  const auto it = std::find(cfg.k_choices.begin(), cfg.k_choices.end(), k);
  if (it != cfg.k_choices.end())
    return static_cast<int>(it - cfg.k_choices.begin());
  // Fall back to the largest available choice.
  return static_cast<int>(cfg.k_choices.size()) - 1;
}

int max_power_index(const SystemConfig& cfg) {
  return static_cast<int>(cfg.power_levels.size()) - 1;
}

}  // namespace

Action dense_policy(const Observation&, const SystemConfig&) {
  Action a;
  a.at_bs = true;
  return a;
}

Action moe_nocot_policy(const Observation&, const SystemConfig& cfg) {
  Action a;
  a.k_index = index_of_k(cfg, 2);
  a.power_index = max_power_index(cfg);
  a.d = 0;
  return a;
}

Action fixed_cot_policy(const Observation&, const SystemConfig& cfg,
                        int d_fixed) {
  if (d_fixed < 0 || d_fixed > cfg.d_max)
    throw std::invalid_argument("fixed_cot_policy: d_fixed outside {0..d_max}");
  Action a;
  a.k_index = index_of_k(cfg, 2);
  a.power_index = max_power_index(cfg);
  a.d = d_fixed;
  return a;
}

}  // namespace megi
