// megisim -- scripted comparison schemes.

#ifndef MEGI_BASELINES_HPP
#define MEGI_BASELINES_HPP

#include <optional>
#include <string>

#include "megi/env.hpp"

namespace megi {

enum class SchemeId {
  kDenseNoCot,
  kMoeNoCot,
  kMoeFixedCot,
  kMoeDynamic,
};

std::string scheme_name(SchemeId id);
std::optional<SchemeId> scheme_from_name(const std::string& name);

inline constexpr int kDefaultFixedDepth = 4;

// All baselines are pure functions of the observation and fixed parameters;
// none of them optimize power, so they pin it at p_max.
Action dense_policy(const Observation& obs, const SystemConfig& cfg);
Action moe_nocot_policy(const Observation& obs, const SystemConfig& cfg);
Action fixed_cot_policy(const Observation& obs, const SystemConfig& cfg,
                        int d_fixed);

}  // namespace megi

#endif  // MEGI_BASELINES_HPP
