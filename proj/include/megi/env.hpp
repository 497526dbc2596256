// megisim -- time-slotted inference environment.
//
// One step resolves one task end-to-end: gating -> top-k routing ->
// power-adaptive downlink -> expert execution at the chosen CoT depth ->
// uplink -> aggregation -> quality/latency verdicts and reward. Corrupted
// transfers (CRC) are retried once; a second corruption fails the task.
//
// Conventions:
//  - The downlink shares bw_downlink equally across the task's k branches;
//    the uplink is bw_uplink per device.
//  - The action's power level drives the BS downlink; devices always
//    transmit the uplink at p_max.
//  - Tasks in a slot all arrive at the slot start and are resolved in
//    arrival order; a device busy with an earlier task queues later branches
//    behind it. Timelines reset at slot boundaries.

#ifndef MEGI_ENV_HPP
#define MEGI_ENV_HPP

#include <deque>
#include <vector>

#include "megi/channel.hpp"
#include "megi/compute.hpp"
#include "megi/moe.hpp"
#include "megi/quality.hpp"
#include "megi/tasks.hpp"

namespace megi {

struct Action {
  int k_index = 0;
  int power_index = 0;
  int d = 0;
  bool at_bs = false;  // dense execution; k/power/d are irrelevant, d -> 0
};

struct Observation {
  std::vector<double> values;  // width 2 + 3*n_devices, see config.hpp
};

inline int observation_width(const SystemConfig& cfg) {
  return 2 + 3 * cfg.n_devices;
}

struct SlotRecord {
  int slot = 0;
  long long task_id = 0;
  Action action;
  int length = 0;
  double complexity = 0.0;
  int k = 0;             // experts used (n_devices when at_bs)
  double power = 0.0;    // downlink watts
  double energy = 0.0;   // J, downlink + compute + uplink + retransmissions
  double latency = 0.0;  // s
  double quality = 0.0;
  bool latency_ok = false;
  bool quality_ok = false;
  bool failed = false;   // CRC failed twice on some branch
  int retransmissions = 0;
};

struct EpisodeMetrics {
  double total_energy = 0.0;
  double acc_sat_rate = 0.0;
  double lat_sat_rate = 0.0;
  long long tasks = 0;
  long long failed = 0;
};

EpisodeMetrics summarize(const std::vector<SlotRecord>& records);

// reward = -energy/e_ref - lambda_lat*[latency violated] - lambda_acc*
// [quality unsatisfied]; failed tasks score both penalties via their flags.
double task_reward(const SystemConfig& cfg, const SlotRecord& r);

struct StepResult {
  Observation obs;  // for the next task (zeros when done)
  double reward = 0.0;
  SlotRecord record;
  bool done = false;
};

class Env {
 public:
  explicit Env(const SystemConfig& cfg);

  // Starts a fresh episode using `seed` for the arrivals/gating/fading
  // streams (the device topology stays pinned to the config).
  Observation reset(std::uint64_t seed);

  StepResult step(const Action& action);

  bool done() const { return done_; }
  const SystemConfig& config() const { return cfg_; }
  const std::vector<DeviceProfile>& devices() const { return devices_; }

  // Reward recomputed from a record, exactly as step() does it.
  double reward_of(const SlotRecord& r) const { return task_reward(cfg_, r); }

 private:
  Observation observe() const;
  void advance_queue();
  SlotRecord resolve(const TaskRequest& task, const Action& action);

  SystemConfig cfg_;
  std::vector<DeviceProfile> devices_;
  std::vector<double> static_gain_;  // pathloss toward each device
  std::vector<double> gain_norm_;    // observation feature

  RngStream arrivals_;
  RngStream gating_;
  RngStream fading_;

  int slot_ = 0;
  long long next_task_id_ = 0;
  std::deque<TaskRequest> slot_queue_;
  std::vector<double> busy_until_;   // per device, within the current slot
  std::vector<double> budget_used_;  // per device FLOPs this slot
  bool done_ = true;
};

}  // namespace megi

#endif  // MEGI_ENV_HPP
