#include "megi/tasks.hpp"

#include <algorithm>

namespace megi {

TaskRequest sample_task(RngStream& rng, const SystemConfig& cfg, int slot,
                        long long id) {
  TaskRequest t;
  t.id = id;
  long long len = 0;
  do {
    len = rng.poisson(cfg.mean_len);
  } while (len == 0);
  t.length = static_cast<int>(std::min<long long>(len, cfg.token_cap));
  t.complexity = rng.uniform();
  t.arrival_slot = slot;
  t.deadline = cfg.deadline;
  return t;
}

std::vector<DeviceProfile> build_devices(const SystemConfig& cfg) {
  RngStream rng(cfg.seed ^ 0x65787074ULL, StreamLabel::kGating);
  std::vector<DeviceProfile> devices(cfg.n_devices);
  for (int i = 0; i < cfg.n_devices; ++i) {
    DeviceProfile& d = devices[i];
    d.id = i;
    d.position = cfg.device_positions[i];
    d.tflops = cfg.device_tflops;
    d.mem = cfg.device_mem;
    d.expert.flops_per_token = cfg.flops_per_token_expert;
    d.expert.mem_footprint = cfg.expert_mem;
    const int specialty = i % kComplexityBands;
    for (int b = 0; b < kComplexityBands; ++b)
      d.expert.affinity[b] =
          (b == specialty ? 1.2 : 0.0) + 0.1 * rng.normal();
  }
  return devices;
}

}  // namespace megi
