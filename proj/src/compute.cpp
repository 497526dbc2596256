#include "megi/compute.hpp"

namespace megi {

ForwardCost forward_cost(long long tokens, int d, const ExpertProfile& expert,
                         const SystemConfig& cfg) {
  ForwardCost c;
  c.passes = 1 + d;
  c.flops = static_cast<double>(tokens) * expert.flops_per_token * c.passes;
  c.output_bits = static_cast<double>(tokens) * cfg.bits_per_token *
                  (1.0 + cfg.cot_payload_factor * d);
  return c;
}

std::pair<double, double> execute_on_device(const ForwardCost& cost,
                                            const DeviceProfile& device,
                                            const SystemConfig& cfg) {
  return {cost.flops / device.tflops, cfg.kappa_device * cost.flops};
}

std::pair<double, double> execute_at_bs(long long tokens,
                                        const SystemConfig& cfg) {
  const double flops = static_cast<double>(tokens) * cfg.flops_per_token_dense;
  return {flops / cfg.bs_tflops, cfg.kappa_bs * flops};
}

}  // namespace megi
