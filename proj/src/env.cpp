#include "megi/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace megi {

EpisodeMetrics summarize(const std::vector<SlotRecord>& records) {
  EpisodeMetrics m;
  m.tasks = static_cast<long long>(records.size());
  if (m.tasks == 0) return m;  // rates defined as 0, caller flags empty runs
  long long acc = 0, lat = 0;
  for (const SlotRecord& r : records) {
    m.total_energy += r.energy;
    if (r.quality_ok) ++acc;
    if (r.latency_ok) ++lat;
    if (r.failed) ++m.failed;
  }
  m.acc_sat_rate = static_cast<double>(acc) / m.tasks;
  m.lat_sat_rate = static_cast<double>(lat) / m.tasks;
  return m;
}

Env::Env(const SystemConfig& cfg) : cfg_(cfg), devices_(build_devices(cfg)) {
  static_gain_.reserve(devices_.size());
  gain_norm_.reserve(devices_.size());
  const double diag = cfg_.area_side * std::sqrt(2.0);
  const double floor_gain = path_gain(diag, cfg_);
  const double span = std::log10(cfg_.ref_gain / floor_gain);
  for (const DeviceProfile& d : devices_) {
    const double dx = d.position[0] - cfg_.bs_position[0];
    const double dy = d.position[1] - cfg_.bs_position[1];
    const double g = path_gain(std::hypot(dx, dy), cfg_);
    static_gain_.push_back(g);
    gain_norm_.push_back(
        std::clamp(std::log10(g / floor_gain) / span, 0.0, 1.0));
  }
}

Observation Env::reset(std::uint64_t seed) {
  arrivals_ = RngStream(seed, StreamLabel::kArrivals);
  gating_ = RngStream(seed, StreamLabel::kGating);
  fading_ = RngStream(seed, StreamLabel::kFading);
  slot_ = -1;
  next_task_id_ = 0;
  slot_queue_.clear();
  busy_until_.assign(devices_.size(), 0.0);
  budget_used_.assign(devices_.size(), 0.0);
  done_ = false;
  advance_queue();
  return observe();
}

void Env::advance_queue() {
  while (slot_queue_.empty()) {
    ++slot_;
    if (slot_ >= cfg_.n_slots) {
      done_ = true;
      return;
    }
    busy_until_.assign(devices_.size(), 0.0);
    budget_used_.assign(devices_.size(), 0.0);
    const long long count = arrivals_.poisson(cfg_.tasks_per_slot_mean);
    for (long long i = 0; i < count; ++i)
      slot_queue_.push_back(
          sample_task(arrivals_, cfg_, slot_, next_task_id_++));
  }
}

Observation Env::observe() const {
  Observation obs;
  obs.values.assign(observation_width(cfg_), 0.0);
  if (done_) return obs;
  const TaskRequest& t = slot_queue_.front();
  obs.values[0] = static_cast<double>(t.length) / cfg_.token_cap;
  obs.values[1] = t.complexity;
  const int band = complexity_band(t.complexity);
  const double slot_budget = cfg_.device_tflops * cfg_.slot_duration;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    obs.values[2 + 3 * i] = gain_norm_[i];
    obs.values[3 + 3 * i] =
        std::max(0.0, 1.0 - budget_used_[i] / slot_budget);
    obs.values[4 + 3 * i] = devices_[i].expert.affinity[band];
  }
  return obs;
}

double task_reward(const SystemConfig& cfg, const SlotRecord& r) {
  return -r.energy / cfg.e_ref - cfg.lambda_lat * (r.latency_ok ? 0.0 : 1.0) -
         cfg.lambda_acc * (r.quality_ok ? 0.0 : 1.0);
}

SlotRecord Env::resolve(const TaskRequest& task, const Action& action) {
  SlotRecord rec;
  rec.slot = slot_;
  rec.task_id = task.id;
  rec.action = action;
  rec.length = task.length;
  rec.complexity = task.complexity;

  if (action.at_bs) {
    const auto [lat, energy] = execute_at_bs(task.length, cfg_);
    rec.k = cfg_.n_devices;  // the dense model spans every expert
    rec.power = 0.0;
    rec.energy = energy;
    rec.latency = lat;
    rec.quality = quality_score(task.complexity, cfg_.n_devices, 0, cfg_);
    rec.latency_ok = rec.latency <= task.deadline;
    rec.quality_ok = satisfied(rec.quality, cfg_).satisfied;
    return rec;
  }

  const int k = cfg_.k_choices[action.k_index];
  const double power = cfg_.power_levels[action.power_index] * cfg_.p_max;
  const int d = action.d;
  rec.k = k;
  rec.power = power;

  const std::vector<double> scores = gating_scores(task, devices_, gating_);
  const GatingAssignment assign = top_k_route(scores, k, task);

  const double bw_branch = cfg_.bw_downlink / k;
  std::vector<ExpertPartial> partials;
  partials.reserve(k);
  double energy = 0.0;
  int retrans = 0;

  for (int i = 0; i < k; ++i) {
    const int dev = assign.experts[i];
    const long long tokens = assign.token_split[i];
    ExpertPartial part;
    part.expert_id = dev;
    part.tokens = static_cast<int>(tokens);
    part.cot_steps = d;
    if (tokens == 0) {  // zero-cost branch
      part.verified = true;
      part.finish_time = 0.0;
      partials.push_back(part);
      continue;
    }

    double gain = static_gain_[dev];
    if (cfg_.fading_enabled) gain *= fading_multiplier(fading_);

    // Downlink: token batch to the expert at the chosen power.
    const double bits_down = tokens * cfg_.bits_per_token;
    const double snr_dl = snr_of(power, gain, bw_branch, cfg_);
    const double rate_dl = link_rate(power, gain, bw_branch, cfg_);
    const LinkBudget dl = transmission(bits_down, rate_dl, power, snr_dl);
    if (!std::isfinite(dl.tx_time)) {
      // Unreachable link: pure latency violation, never a crash.
      part.verified = true;
      part.finish_time = dl.tx_time;
      partials.push_back(part);
      continue;
    }

    double t = dl.tx_time;
    energy += dl.tx_energy;
    if (packet_error(snr_dl, bits_down, fading_)) {
      ++retrans;
      t += dl.tx_time;
      energy += dl.tx_energy;
      if (packet_error(snr_dl, bits_down, fading_)) {
        part.verified = false;  // expert never got clean input
        part.finish_time = t;
        partials.push_back(part);
        continue;
      }
    }

    // Expert execution, queued behind earlier work on the same device.
    const ForwardCost cost = forward_cost(tokens, d, devices_[dev].expert, cfg_);
    const auto [comp_time, comp_energy] =
        execute_on_device(cost, devices_[dev], cfg_);
    t = std::max(t, busy_until_[dev]) + comp_time;
    energy += comp_energy;
    budget_used_[dev] += cost.flops;

    // Uplink: results back to the BS at the device's full power.
    const double snr_ul = snr_of(cfg_.p_max, gain, cfg_.bw_uplink, cfg_);
    const double rate_ul = link_rate(cfg_.p_max, gain, cfg_.bw_uplink, cfg_);
    const LinkBudget ul =
        transmission(cost.output_bits, rate_ul, cfg_.p_max, snr_ul);
    if (!std::isfinite(ul.tx_time)) {
      part.verified = true;
      part.finish_time = ul.tx_time;
      busy_until_[dev] = t;
      partials.push_back(part);
      continue;
    }

    t += ul.tx_time;
    energy += ul.tx_energy;
    part.verified = true;
    if (packet_error(snr_ul, cost.output_bits, fading_)) {
      ++retrans;
      t += ul.tx_time;
      energy += ul.tx_energy;
      if (packet_error(snr_ul, cost.output_bits, fading_))
        part.verified = false;
    }
    busy_until_[dev] = t;
    part.finish_time = t;
    partials.push_back(part);
  }

  const TaskResult result = aggregate(partials, assign);
  rec.energy = energy;
  rec.latency = result.latency;
  rec.quality = quality_score(task.complexity, k, d, cfg_);
  rec.failed = !result.completed;
  rec.latency_ok = !rec.failed && rec.latency <= task.deadline;
  rec.quality_ok = !rec.failed && satisfied(rec.quality, cfg_).satisfied;
  rec.retransmissions = retrans;
  return rec;
}

StepResult Env::step(const Action& action) {
  if (done_) throw std::logic_error("step: episode is done, call reset");
  if (!action.at_bs) {
    if (action.k_index < 0 ||
        action.k_index >= static_cast<int>(cfg_.k_choices.size()))
      throw std::out_of_range("step: k_index outside k_choices");
    if (action.power_index < 0 ||
        action.power_index >= static_cast<int>(cfg_.power_levels.size()))
      throw std::out_of_range("step: power_index outside power_levels");
    if (action.d < 0 || action.d > cfg_.d_max)
      throw std::out_of_range("step: d outside {0..d_max}");
  }

  const TaskRequest task = slot_queue_.front();
  slot_queue_.pop_front();

  StepResult out;
  out.record = resolve(task, action);
  out.reward = reward_of(out.record);
  advance_queue();
  out.done = done_;
  out.obs = observe();
  return out;
}

}  // namespace megi
