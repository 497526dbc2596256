// megisim -- gating, top-k routing and result aggregation.
//
// Routing is per task: the gating network scores every expert for the
// task's complexity band, the top-k are selected, and the task's tokens are
// split across them in proportion to the renormalized weights.

#ifndef MEGI_MOE_HPP
#define MEGI_MOE_HPP

#include <vector>

#include "megi/tasks.hpp"

namespace megi {

inline constexpr double kGatingNoiseSigma = 0.5;

struct GatingAssignment {
  long long task_id = 0;
  std::vector<int> experts;       // ascending device index, |experts| = k
  std::vector<double> weights;    // renormalized, sum 1
  std::vector<int> token_split;   // sums exactly to task length
};

// What one expert reports back for its branch.
struct ExpertPartial {
  int expert_id = 0;
  int tokens = 0;
  int cot_steps = 0;
  bool verified = false;     // uplink passed CRC (after at most one retry)
  double finish_time = 0.0;  // end of the branch path, relative to task start
};

struct TaskResult {
  bool completed = false;
  double latency = 0.0;              // max branch finish time
  std::vector<double> weights_used;  // audit copy of the gating weights
};

// Softmax over (affinity for the task's band + Gaussian noise). rng is the
// gating stream; sigma is exposed for tests.
std::vector<double> gating_scores(const TaskRequest& task,
                                  const std::vector<DeviceProfile>& devices,
                                  RngStream& rng,
                                  double sigma = kGatingNoiseSigma);

// Selects the k largest weights (ties -> lowest index), renormalizes them,
// and splits task.length tokens by nearest-even rounding with a
// largest-remainder correction so the split sums exactly.
GatingAssignment top_k_route(const std::vector<double>& weights, int k,
                             const TaskRequest& task);

// A task completes only when every selected expert's partial is verified;
// its latency is the slowest branch.
TaskResult aggregate(const std::vector<ExpertPartial>& partials,
                     const GatingAssignment& assignment);

}  // namespace megi

#endif  // MEGI_MOE_HPP
