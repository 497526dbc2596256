// megisim -- batch experiment runner shared by the CLI and the tests.
//
// Output conventions: every CSV starts with one '#' comment line carrying
// the artifact version, config hash and seed; files are written atomically
// (tmp + rename) and byte-identically for identical manifests.

#ifndef MEGI_RUNNER_HPP
#define MEGI_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "megi/baselines.hpp"
#include "megi/checkpoint.hpp"
#include "megi/env.hpp"
#include "megi/ppo.hpp"

namespace megi {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
  SchemeId scheme = SchemeId::kMoeNoCot;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string records_csv;
  std::string metrics_json;
  std::string checkpoint_path;  // dynamic scheme only
  int d_fixed = kDefaultFixedDepth;
};

struct SchemeRun {
  EpisodeMetrics metrics;
  std::vector<SlotRecord> records;
};

// Runs one full episode under the scheme's policy. The dynamic scheme needs
// a trained net (greedy head selection) whose input width matches the config.
SchemeRun run_scheme_episode(const SystemConfig& cfg, SchemeId scheme,
                             std::uint64_t seed, const PolicyNet* policy,
                             int d_fixed = kDefaultFixedDepth);

std::string format_records_csv(const SystemConfig& cfg, SchemeId scheme,
                               std::uint64_t seed,
                               const std::vector<SlotRecord>& records);

std::string format_metrics_json(const SystemConfig& cfg, SchemeId scheme,
                                std::uint64_t seed,
                                const EpisodeMetrics& metrics);

struct SummaryRow {
  std::string scheme;
  std::string seed;  // a number, "mean" or "sd"
  double total_energy_j = 0.0;
  double acc_sat_rate = 0.0;
  double lat_sat_rate = 0.0;
  double tasks = 0.0;
  double failed = 0.0;
};

// Per-(scheme, seed) rows in input order plus mean and sd rows per scheme.
std::vector<SummaryRow> summarize_runs(
    const std::vector<std::pair<SchemeId, std::uint64_t>>& runs,
    const std::vector<EpisodeMetrics>& metrics);

std::string format_summary_csv(const SystemConfig& cfg,
                               const std::vector<SummaryRow>& rows);

void write_text_atomic(const std::string& path, const std::string& content);

// `run` subcommand: episode + records CSV + metrics JSON.
EpisodeMetrics run_scheme_to_files(const SystemConfig& cfg,
                                   const RunManifest& manifest);

// `compare` subcommand: per-run files plus summary.csv under out_dir.
// Returns the summary rows.
std::vector<SummaryRow> compare_to_files(
    const SystemConfig& cfg, const std::vector<SchemeId>& schemes,
    const std::vector<std::uint64_t>& seeds,
    const std::optional<std::string>& checkpoint_path, int d_fixed,
    const std::string& out_dir);

// `train` subcommand: writes training_log.csv, periodic checkpoints and the
// final checkpoint.json under out_dir. Returns the training result.
TrainResult train_to_files(const SystemConfig& cfg, const TrainConfig& hp,
                           std::uint64_t seed, const std::string& out_dir);

std::string format_training_log_csv(const SystemConfig& cfg,
                                    std::uint64_t seed,
                                    const std::vector<IterationLog>& log);

}  // namespace megi

#endif  // MEGI_RUNNER_HPP
