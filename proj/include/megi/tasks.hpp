// megisim -- inference tasks and edge device profiles.

#ifndef MEGI_TASKS_HPP
#define MEGI_TASKS_HPP

#include <array>
#include <vector>

#include "megi/config.hpp"
#include "megi/rng.hpp"

namespace megi {

struct TaskRequest {
  long long id = 0;
  int length = 0;            // tokens, in [1, token_cap]
  double complexity = 0.0;   // in [0, 1]
  int arrival_slot = 0;
  double deadline = 0.0;     // s
};

struct ExpertProfile {
  double flops_per_token = 0.0;
  double mem_footprint = 0.0;  // bytes
  std::array<double, kComplexityBands> affinity{};  // gating-logit bias
};

struct DeviceProfile {
  int id = 0;
  std::array<double, 2> position{};
  double tflops = 0.0;  // FLOP/s
  double mem = 0.0;     // bytes
  ExpertProfile expert;
};

// Draws one task: length ~ min(Poisson(mean_len), token_cap), redrawn while
// zero; complexity ~ Uniform(0,1). rng must be the arrivals stream.
TaskRequest sample_task(RngStream& rng, const SystemConfig& cfg, int slot,
                        long long id);

// Builds the device fleet from a validated config. Expert affinities are
// derived from the seed: each device specializes in one complexity band
// (round-robin) with a +1.2 logit bias plus small jitter, standing in for
// per-domain fine-tuning.
std::vector<DeviceProfile> build_devices(const SystemConfig& cfg);

}  // namespace megi

#endif  // MEGI_TASKS_HPP
