// megisim -- distributed PPO trainer.
//
// Synchronous layout: each iteration, `workers` rollout workers advance
// private environment instances under a read-only copy of the current
// policy; the learner computes GAE per worker, pools the samples and runs
// clipped-surrogate minibatch updates with Adam. The learner is the only
// writer of parameters, strictly between rollout phases.

#ifndef MEGI_PPO_HPP
#define MEGI_PPO_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "megi/env.hpp"
#include "megi/policy_net.hpp"

namespace megi {

struct TrainConfig {
  int workers = 4;
  int horizon = 256;  // steps per worker per iteration
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  int epochs = 4;
  int minibatch = 64;
  double vf_coef = 0.5;
  double ent_coef = 0.01;
  double adam_lr = 3e-4;
  int iterations = 300;
  int hidden = 64;
  int checkpoint_every = 50;
  std::vector<std::uint64_t> eval_seeds{101, 102, 103};
};

// A_t = delta_t + gamma*lambda*A_{t+1}, delta_t = r_t + gamma*V_{t+1} - V_t,
// with `bootstrap` standing in for V after the last step; returns = A + V.
struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

GaeResult gae(const std::vector<double>& rewards,
              const std::vector<double>& values, double bootstrap,
              double gamma, double lambda);

// One worker's experience for an iteration.
struct RolloutBuffer {
  std::vector<Sample> samples;  // advantage/ret filled in by the learner
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;
  std::vector<double> final_obs;  // observation after the last step

  // rollout-batch metrics
  long long lat_ok = 0;
  long long acc_ok = 0;
  double energy_sum = 0.0;
  double reward_sum = 0.0;
};

// Samples head actions from the policy and steps the environment `horizon`
// times. Episodes ending mid-rollout reset with a fresh derived seed. A
// worker's sample stream is a function of its seed alone, so swapping the
// seeds of two workers swaps their buffers verbatim.
class RolloutWorker {
 public:
  RolloutWorker(const SystemConfig& cfg, std::uint64_t worker_seed);

  RolloutBuffer collect(const PolicyNet& net, int horizon);

 private:
  Env env_;
  RngStream rng_;  // action sampling (rollout stream)
  std::uint64_t worker_seed_;
  long long episode_ = 0;
  Observation obs_;
};

struct IterationLog {
  int iteration = 0;
  double mean_reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double lat_sat = 0.0;
  double acc_sat = 0.0;
  double energy_mean = 0.0;
};

struct TrainResult {
  PolicyNet net;
  std::vector<IterationLog> log;
  bool aborted = false;
  std::string abort_reason;
};

struct TrainSinks {
  // Called at every checkpoint_every-th iteration and at the end.
  std::function<void(int iteration, const PolicyNet&)> on_checkpoint;
  std::function<void(const IterationLog&)> on_log;
};

TrainResult train(const SystemConfig& cfg, const TrainConfig& hp,
                  std::uint64_t seed, const TrainSinks& sinks = {});

// Deterministic (argmax) action for evaluation runs.
Action greedy_action(const PolicyNet& net, const Observation& obs);

// Seed derivation shared by workers and episode reseeding.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace megi

#endif  // MEGI_PPO_HPP
