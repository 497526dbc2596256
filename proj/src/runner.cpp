#include "megi/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace megi {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Action scheme_action(SchemeId scheme, const Observation& obs,
                     const SystemConfig& cfg, const PolicyNet* policy,
                     int d_fixed) {
  switch (scheme) {
    case SchemeId::kDenseNoCot: return dense_policy(obs, cfg);
    case SchemeId::kMoeNoCot: return moe_nocot_policy(obs, cfg);
    case SchemeId::kMoeFixedCot: return fixed_cot_policy(obs, cfg, d_fixed);
    case SchemeId::kMoeDynamic: return greedy_action(*policy, obs);
  }
  throw std::logic_error("scheme_action: bad scheme");
}

}  // namespace

SchemeRun run_scheme_episode(const SystemConfig& cfg, SchemeId scheme,
                             std::uint64_t seed, const PolicyNet* policy,
                             int d_fixed) {
  if (scheme == SchemeId::kMoeDynamic) {
    if (!policy)
      throw std::invalid_argument("moe_dynamic requires a trained checkpoint");
    if (policy->input_dim != observation_width(cfg))
      throw std::runtime_error(
          "checkpoint width mismatch: net expects " +
          std::to_string(policy->input_dim) + " features, config yields " +
          std::to_string(observation_width(cfg)));
  }

  SchemeRun out;
  Env env(cfg);
  Observation obs = env.reset(seed);
  while (!env.done()) {
    const Action a = scheme_action(scheme, obs, cfg, policy, d_fixed);
    StepResult res = env.step(a);
    out.records.push_back(res.record);
    obs = std::move(res.obs);
  }
  out.metrics = summarize(out.records);
  return out;
}

std::string format_records_csv(const SystemConfig& cfg, SchemeId scheme,
                               std::uint64_t seed,
                               const std::vector<SlotRecord>& records) {
  std::ostringstream os;
  os << "# megisim v" << kArtifactVersion << " scheme=" << scheme_name(scheme)
     << " seed=" << seed << " config_hash=" << config_hash(cfg) << "\n";
  os << "slot,task_id,length,complexity,k,power_w,d,at_bs,energy_j,latency_s,"
        "quality,latency_ok,quality_ok,failed,retransmissions,reward\n";
  for (const SlotRecord& r : records) {
    os << r.slot << ',' << r.task_id << ',' << r.length << ','
       << fmt(r.complexity) << ',' << r.k << ',' << fmt(r.power) << ','
       << (r.action.at_bs ? 0 : r.action.d) << ',' << (r.action.at_bs ? 1 : 0)
       << ',' << fmt(r.energy) << ',' << fmt(r.latency) << ','
       << fmt(r.quality) << ',' << (r.latency_ok ? 1 : 0) << ','
       << (r.quality_ok ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ','
       << r.retransmissions << ',' << fmt(task_reward(cfg, r)) << "\n";
  }
  return os.str();
}

std::string format_metrics_json(const SystemConfig& cfg, SchemeId scheme,
                                std::uint64_t seed,
                                const EpisodeMetrics& metrics) {
  nlohmann::ordered_json j;
  j["scheme"] = scheme_name(scheme);
  j["seed"] = seed;
  j["total_energy_j"] = metrics.total_energy;
  j["acc_sat_rate"] = metrics.acc_sat_rate;
  j["lat_sat_rate"] = metrics.lat_sat_rate;
  j["tasks"] = metrics.tasks;
  j["failed"] = metrics.failed;
  j["config_hash"] = config_hash(cfg);
  return j.dump(2) + "\n";
}

std::vector<SummaryRow> summarize_runs(
    const std::vector<std::pair<SchemeId, std::uint64_t>>& runs,
    const std::vector<EpisodeMetrics>& metrics) {
  if (runs.size() != metrics.size())
    throw std::invalid_argument("summarize_runs: size mismatch");

  std::vector<SummaryRow> rows;
  std::vector<SchemeId> scheme_order;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const EpisodeMetrics& m = metrics[i];
    SummaryRow r;
    r.scheme = scheme_name(runs[i].first);
    r.seed = std::to_string(runs[i].second);
    r.total_energy_j = m.total_energy;
    r.acc_sat_rate = m.acc_sat_rate;
    r.lat_sat_rate = m.lat_sat_rate;
    r.tasks = static_cast<double>(m.tasks);
    r.failed = static_cast<double>(m.failed);
    rows.push_back(std::move(r));
    bool seen = false;
    for (SchemeId s : scheme_order) seen = seen || s == runs[i].first;
    if (!seen) scheme_order.push_back(runs[i].first);
  }

  for (SchemeId s : scheme_order) {
    std::vector<const SummaryRow*> member;
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (runs[i].first == s) member.push_back(&rows[i]);
    const double n = static_cast<double>(member.size());

    auto fold = [&](auto get) {
      double mean = 0.0;
      for (const SummaryRow* r : member) mean += get(*r);
      mean /= n;
      double var = 0.0;
      for (const SummaryRow* r : member) {
        const double d = get(*r) - mean;
        var += d * d;
      }
      const double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
      return std::pair{mean, sd};
    };

    SummaryRow mean, sd;
    mean.scheme = sd.scheme = scheme_name(s);
    mean.seed = "mean";
    sd.seed = "sd";
    std::tie(mean.total_energy_j, sd.total_energy_j) =
        fold([](const SummaryRow& r) { return r.total_energy_j; });
    std::tie(mean.acc_sat_rate, sd.acc_sat_rate) =
        fold([](const SummaryRow& r) { return r.acc_sat_rate; });
    std::tie(mean.lat_sat_rate, sd.lat_sat_rate) =
        fold([](const SummaryRow& r) { return r.lat_sat_rate; });
    std::tie(mean.tasks, sd.tasks) =
        fold([](const SummaryRow& r) { return r.tasks; });
    std::tie(mean.failed, sd.failed) =
        fold([](const SummaryRow& r) { return r.failed; });
    rows.push_back(std::move(mean));
    rows.push_back(std::move(sd));
  }
  return rows;
}

std::string format_summary_csv(const SystemConfig& cfg,
                               const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "# megisim v" << kArtifactVersion << " config_hash=" << config_hash(cfg)
     << "\n";
  os << "scheme,seed,total_energy_j,acc_sat_rate,lat_sat_rate,tasks,failed\n";
  for (const SummaryRow& r : rows)
    os << r.scheme << ',' << r.seed << ',' << fmt(r.total_energy_j) << ','
       << fmt(r.acc_sat_rate) << ',' << fmt(r.lat_sat_rate) << ','
       << fmt(r.tasks) << ',' << fmt(r.failed) << "\n";
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

EpisodeMetrics run_scheme_to_files(const SystemConfig& cfg,
                                   const RunManifest& manifest) {
  const PolicyNet* policy = nullptr;
  Checkpoint ck;
  if (manifest.scheme == SchemeId::kMoeDynamic) {
    ck = load_checkpoint(manifest.checkpoint_path);
    policy = &ck.net;
  }
  const SchemeRun run = run_scheme_episode(cfg, manifest.scheme, manifest.seed,
                                           policy, manifest.d_fixed);
  if (!manifest.records_csv.empty())
    write_text_atomic(manifest.records_csv,
                      format_records_csv(cfg, manifest.scheme, manifest.seed,
                                         run.records));
  if (!manifest.metrics_json.empty())
    write_text_atomic(manifest.metrics_json,
                      format_metrics_json(cfg, manifest.scheme, manifest.seed,
                                          run.metrics));
  return run.metrics;
}

std::vector<SummaryRow> compare_to_files(
    const SystemConfig& cfg, const std::vector<SchemeId>& schemes,
    const std::vector<std::uint64_t>& seeds,
    const std::optional<std::string>& checkpoint_path, int d_fixed,
    const std::string& out_dir) {
  if (schemes.empty() || seeds.empty())
    throw std::invalid_argument("compare: need at least one scheme and seed");

  Checkpoint ck;
  const PolicyNet* policy = nullptr;
  for (SchemeId s : schemes)
    if (s == SchemeId::kMoeDynamic) {
      if (!checkpoint_path)
        throw std::invalid_argument("moe_dynamic requires a trained checkpoint");
      ck = load_checkpoint(*checkpoint_path);
      policy = &ck.net;
    }

  namespace fs = std::filesystem;
  std::vector<std::pair<SchemeId, std::uint64_t>> runs;
  std::vector<EpisodeMetrics> metrics;
  for (SchemeId s : schemes)
    for (std::uint64_t seed : seeds) {
      const std::string stem =
          scheme_name(s) + "_seed" + std::to_string(seed);
      try {
        const SchemeRun run = run_scheme_episode(cfg, s, seed, policy, d_fixed);
        write_text_atomic((fs::path(out_dir) / (stem + ".csv")).string(),
                          format_records_csv(cfg, s, seed, run.records));
        write_text_atomic((fs::path(out_dir) / (stem + ".json")).string(),
                          format_metrics_json(cfg, s, seed, run.metrics));
        runs.emplace_back(s, seed);
        metrics.push_back(run.metrics);
      } catch (const std::exception& e) {
        throw std::runtime_error("compare: run failed for scheme=" +
                                 scheme_name(s) + " seed=" +
                                 std::to_string(seed) + " config_hash=" +
                                 config_hash(cfg) + ": " + e.what());
      }
    }

  const std::vector<SummaryRow> rows = summarize_runs(runs, metrics);
  write_text_atomic((fs::path(out_dir) / "summary.csv").string(),
                    format_summary_csv(cfg, rows));
  return rows;
}

std::string format_training_log_csv(const SystemConfig& cfg,
                                    std::uint64_t seed,
                                    const std::vector<IterationLog>& log) {
  std::ostringstream os;
  os << "# megisim v" << kArtifactVersion << " seed=" << seed
     << " config_hash=" << config_hash(cfg) << "\n";
  os << "iteration,mean_reward,policy_loss,value_loss,entropy,lat_sat,"
        "acc_sat,energy_mean\n";
  for (const IterationLog& l : log)
    os << l.iteration << ',' << fmt(l.mean_reward) << ',' << fmt(l.policy_loss)
       << ',' << fmt(l.value_loss) << ',' << fmt(l.entropy) << ','
       << fmt(l.lat_sat) << ',' << fmt(l.acc_sat) << ',' << fmt(l.energy_mean)
       << "\n";
  return os.str();
}

TrainResult train_to_files(const SystemConfig& cfg, const TrainConfig& hp,
                           std::uint64_t seed, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string hash = config_hash(cfg);

  TrainSinks sinks;
  sinks.on_checkpoint = [&](int iteration, const PolicyNet& net) {
    char name[64];
    std::snprintf(name, sizeof name, "checkpoint_iter%05d.json", iteration);
    save_checkpoint(net, hash, (fs::path(out_dir) / name).string());
  };

  TrainResult result = train(cfg, hp, seed, sinks);
  save_checkpoint(result.net, hash,
                  (fs::path(out_dir) / "checkpoint.json").string());
  write_text_atomic((fs::path(out_dir) / "training_log.csv").string(),
                    format_training_log_csv(cfg, seed, result.log));
  return result;
}

}  // namespace megi
