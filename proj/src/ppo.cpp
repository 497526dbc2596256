#include "megi/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace megi {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

GaeResult gae(const std::vector<double>& rewards,
              const std::vector<double>& values, double bootstrap,
              double gamma, double lambda) {
  if (rewards.size() != values.size())
    throw std::invalid_argument("gae: |rewards| != |values|");
  const int n = static_cast<int>(rewards.size());
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double acc = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const double next_v = (t == n - 1) ? bootstrap : values[t + 1];
    const double delta = rewards[t] + gamma * next_v - values[t];
    acc = delta + gamma * lambda * acc;
    out.advantages[t] = acc;
    out.returns[t] = acc + values[t];
  }
  return out;
}

namespace {

int sample_categorical(const std::vector<double>& probs, RngStream& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

Action greedy_action(const PolicyNet& net, const Observation& obs) {
  const NetOutput out = net_forward(net, obs.values);
  Action a;
  a.k_index = static_cast<int>(
      std::max_element(out.probs[0].begin(), out.probs[0].end()) -
      out.probs[0].begin());
  a.power_index = static_cast<int>(
      std::max_element(out.probs[1].begin(), out.probs[1].end()) -
      out.probs[1].begin());
  a.d = static_cast<int>(
      std::max_element(out.probs[2].begin(), out.probs[2].end()) -
      out.probs[2].begin());
  return a;
}

RolloutWorker::RolloutWorker(const SystemConfig& cfg, std::uint64_t worker_seed)
    : env_(cfg),
      rng_(worker_seed, StreamLabel::kRollout),
      worker_seed_(worker_seed) {
  obs_ = env_.reset(mix_seed(worker_seed_, episode_));
}

RolloutBuffer RolloutWorker::collect(const PolicyNet& net, int horizon) {
  RolloutBuffer buf;
  buf.samples.reserve(horizon);
  buf.rewards.reserve(horizon);
  buf.values.reserve(horizon);
  buf.dones.reserve(horizon);

  for (int t = 0; t < horizon; ++t) {
    const NetOutput out = net_forward(net, obs_.values);

    Sample s;
    s.obs = obs_.values;
    s.action[0] = sample_categorical(out.probs[0], rng_);
    s.action[1] = sample_categorical(out.probs[1], rng_);
    s.action[2] = sample_categorical(out.probs[2], rng_);
    s.logp_old = out.log_probs[0][s.action[0]] +
                 out.log_probs[1][s.action[1]] +
                 out.log_probs[2][s.action[2]];

    Action a;
    a.k_index = s.action[0];
    a.power_index = s.action[1];
    a.d = s.action[2];
    const StepResult res = env_.step(a);

    buf.samples.push_back(std::move(s));
    buf.rewards.push_back(res.reward);
    buf.values.push_back(out.value);
    buf.dones.push_back(res.done ? 1 : 0);
    buf.reward_sum += res.reward;
    buf.energy_sum += res.record.energy;
    if (res.record.latency_ok) ++buf.lat_ok;
    if (res.record.quality_ok) ++buf.acc_ok;

    if (res.done) {
      ++episode_;
      obs_ = env_.reset(mix_seed(worker_seed_, episode_));
    } else {
      obs_ = res.obs;
    }
  }
  buf.final_obs = obs_.values;
  return buf;
}

namespace {

// GAE per episode segment so the pure recursion never crosses a terminal.
void attach_advantages(RolloutBuffer& buf, const PolicyNet& net,
                       double gamma, double lambda) {
  const int n = static_cast<int>(buf.rewards.size());
  int start = 0;
  while (start < n) {
    int end = start;
    while (end < n && !buf.dones[end]) ++end;
    const bool terminal = end < n;  // segment closed by a done flag
    if (terminal) ++end;

    std::vector<double> rewards(buf.rewards.begin() + start,
                                buf.rewards.begin() + end);
    std::vector<double> values(buf.values.begin() + start,
                               buf.values.begin() + end);
    double bootstrap = 0.0;
    if (!terminal) {
      const std::vector<double>& next_obs =
          (end == n) ? buf.final_obs : buf.samples[end].obs;
      bootstrap = net_forward(net, next_obs).value;
    }
    const GaeResult g = gae(rewards, values, bootstrap, gamma, lambda);
    for (int i = 0; i < static_cast<int>(rewards.size()); ++i) {
      buf.samples[start + i].advantage = g.advantages[i];
      buf.samples[start + i].ret = g.returns[i];
    }
    start = end;
  }
}

}  // namespace

TrainResult train(const SystemConfig& cfg, const TrainConfig& hp,
                  std::uint64_t seed, const TrainSinks& sinks) {
  if (hp.workers < 1) throw std::invalid_argument("train: workers must be >= 1");
  if (hp.gamma <= 0.0 || hp.gamma > 1.0)
    throw std::invalid_argument("train: gamma must be in (0,1]");
  if (hp.gae_lambda <= 0.0 || hp.gae_lambda > 1.0)
    throw std::invalid_argument("train: lambda must be in (0,1]");
  if (hp.clip_eps <= 0.0) throw std::invalid_argument("train: clip_eps <= 0");

  const int obs_width = observation_width(cfg);
  RngStream init_rng(seed, StreamLabel::kPolicyInit);
  const std::array<int, kNumHeads> heads{
      static_cast<int>(cfg.k_choices.size()),
      static_cast<int>(cfg.power_levels.size()), cfg.d_max + 1};

  TrainResult result;
  result.net = make_policy_net(obs_width, hp.hidden, heads, init_rng);

  std::vector<RolloutWorker> workers;
  workers.reserve(hp.workers);
  for (int w = 0; w < hp.workers; ++w)
    workers.emplace_back(cfg, mix_seed(seed, w));

  AdamOptimizer opt(result.net, hp.adam_lr);
  RngStream shuffle_rng(mix_seed(seed, 0x6c726eULL), StreamLabel::kRollout);
  const PpoHyper loss_hp{hp.clip_eps, hp.vf_coef, hp.ent_coef};
  PolicyNet last_good = result.net;

  for (int iter = 0; iter < hp.iterations; ++iter) {
    // Rollout phase: read-only snapshot of the parameters per worker.
    const PolicyNet snapshot = result.net;
    std::vector<RolloutBuffer> buffers(hp.workers);
    {
      std::vector<std::thread> threads;
      threads.reserve(hp.workers);
      for (int w = 0; w < hp.workers; ++w)
        threads.emplace_back([&, w] {
          buffers[w] = workers[w].collect(snapshot, hp.horizon);
        });
      for (auto& t : threads) t.join();
    }

    // Per-worker GAE, then pool in worker order (order-independent multiset;
    // the learner's own stream shuffles below).
    std::vector<Sample> pool;
    pool.reserve(static_cast<std::size_t>(hp.workers) * hp.horizon);
    IterationLog log;
    log.iteration = iter;
    long long steps = 0;
    for (RolloutBuffer& buf : buffers) {
      attach_advantages(buf, snapshot, hp.gamma, hp.gae_lambda);
      steps += static_cast<long long>(buf.samples.size());
      log.mean_reward += buf.reward_sum;
      log.energy_mean += buf.energy_sum;
      log.lat_sat += static_cast<double>(buf.lat_ok);
      log.acc_sat += static_cast<double>(buf.acc_ok);
      for (Sample& s : buf.samples) pool.push_back(std::move(s));
    }
    log.mean_reward /= steps;
    log.energy_mean /= steps;
    log.lat_sat /= steps;
    log.acc_sat /= steps;

    // Learn phase.
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    double loss_updates = 0.0;
    bool nan_abort = false;
    for (int epoch = 0; epoch < hp.epochs && !nan_abort; ++epoch) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
      for (std::size_t start = 0; start < order.size() && !nan_abort;
           start += hp.minibatch) {
        const std::size_t stop =
            std::min(order.size(), start + static_cast<std::size_t>(hp.minibatch));
        std::vector<Sample> batch;
        batch.reserve(stop - start);
        for (std::size_t i = start; i < stop; ++i)
          batch.push_back(pool[order[i]]);

        PolicyNet grads = zeros_like(result.net);
        const LossStats stats = ppo_loss(result.net, batch, loss_hp, &grads);
        if (!std::isfinite(stats.total)) {
          nan_abort = true;
          break;
        }
        opt.apply(result.net, grads);
        log.policy_loss += stats.policy;
        log.value_loss += stats.value;
        log.entropy += stats.entropy;
        loss_updates += 1.0;
      }
    }
    if (nan_abort) {
      result.net = last_good;  // retain the last good checkpoint
      result.aborted = true;
      result.abort_reason =
          "non-finite loss at iteration " + std::to_string(iter);
      break;
    }
    if (loss_updates > 0.0) {
      log.policy_loss /= loss_updates;
      log.value_loss /= loss_updates;
      log.entropy /= loss_updates;
    }

    last_good = result.net;
    result.log.push_back(log);
    if (sinks.on_log) sinks.on_log(log);
    if (sinks.on_checkpoint && hp.checkpoint_every > 0 &&
        (iter + 1) % hp.checkpoint_every == 0 && iter + 1 < hp.iterations)
      sinks.on_checkpoint(iter + 1, result.net);
  }

  if (sinks.on_checkpoint)
    sinks.on_checkpoint(static_cast<int>(result.log.size()), result.net);
  return result;
}

}  // namespace megi
