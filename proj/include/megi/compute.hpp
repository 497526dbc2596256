// megisim -- expert-side cost model.
//
// Each CoT step is one extra forward pass over the branch's tokens, so
// compute scales with (1+d); the reasoning chain also inflates the uplink
// payload by cot_payload_factor per step.

#ifndef MEGI_COMPUTE_HPP
#define MEGI_COMPUTE_HPP

#include <utility>

#include "megi/tasks.hpp"

namespace megi {

struct ForwardCost {
  double flops = 0.0;
  double output_bits = 0.0;
  int passes = 1;  // 1 + d
};

ForwardCost forward_cost(long long tokens, int d, const ExpertProfile& expert,
                         const SystemConfig& cfg);

// (latency seconds, energy joules) of running `cost` on a device.
std::pair<double, double> execute_on_device(const ForwardCost& cost,
                                            const DeviceProfile& device,
                                            const SystemConfig& cfg);

// Dense execution at the BS, used by the dense baseline.
std::pair<double, double> execute_at_bs(long long tokens,
                                        const SystemConfig& cfg);

}  // namespace megi

#endif  // MEGI_COMPUTE_HPP
