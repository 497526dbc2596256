// megisim command line: validate configs, run scheme episodes, train the
// dynamic policy, and compare schemes across seeds.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "megi/runner.hpp"

namespace {

using namespace megi;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

SystemConfig load_or_exit(const std::string& path) {
  ConfigResult r = load_config_file(path);
  if (!r.ok()) {
    std::cerr << "config error(s) in " << path << ":\n";
    for (const std::string& e : r.errors) std::cerr << "  " << e << "\n";
    std::exit(kExitUsage);
  }
  return r.cfg;
}

SchemeId scheme_or_exit(const std::string& name) {
  const auto id = scheme_from_name(name);
  if (!id) {
    std::cerr << "unknown scheme '" << name
              << "' (expected dense_nocot, moe_nocot, moe_fixed_cot or "
                 "moe_dynamic)\n";
    std::exit(kExitUsage);
  }
  return *id;
}

// "A..B" inclusive range or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t a = std::stoull(text.substr(0, dots));
    const std::uint64_t b = std::stoull(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument("seed range end before start");
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"megisim: distributed MoE edge-inference simulator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "config JSON path")
      ->required()
      ->check(CLI::ExistingFile);

  auto* cmd_validate =
      app.add_subcommand("validate", "validate a config and print its hash");

  auto* cmd_run = app.add_subcommand("run", "run one scheme episode");
  std::string run_scheme = "moe_nocot";
  std::uint64_t run_seed = 1;
  std::string run_out = "out";
  std::string run_ckpt;
  int d_fixed = kDefaultFixedDepth;
  cmd_run->add_option("--scheme", run_scheme, "scheme name")->required();
  cmd_run->add_option("--seed", run_seed, "episode seed");
  cmd_run->add_option("--out", run_out, "output directory");
  cmd_run->add_option("--checkpoint", run_ckpt,
                      "policy checkpoint (moe_dynamic)");
  cmd_run->add_option("--d-fixed", d_fixed, "depth for moe_fixed_cot");

  auto* cmd_train = app.add_subcommand("train", "train the dynamic policy");
  std::uint64_t train_seed = 1;
  std::string train_out = "out/train";
  TrainConfig hp;
  cmd_train->add_option("--seed", train_seed, "training seed");
  cmd_train->add_option("--out", train_out, "output directory");
  cmd_train->add_option("--iterations", hp.iterations, "training iterations");
  cmd_train->add_option("--workers", hp.workers, "rollout workers");
  cmd_train->add_option("--horizon", hp.horizon, "steps per worker/iteration");

  auto* cmd_compare =
      app.add_subcommand("compare", "run schemes x seeds and summarize");
  std::string cmp_schemes =
      "dense_nocot,moe_nocot,moe_fixed_cot,moe_dynamic";
  std::string cmp_seeds = "1,2,3";
  std::string cmp_out = "out/compare";
  std::string cmp_ckpt;
  cmd_compare->add_option("--schemes", cmp_schemes, "comma list of schemes");
  cmd_compare->add_option("--seeds", cmp_seeds, "comma list or A..B range");
  cmd_compare->add_option("--out", cmp_out, "output directory");
  cmd_compare->add_option("--checkpoint", cmp_ckpt,
                          "policy checkpoint (moe_dynamic)");
  cmd_compare->add_option("--d-fixed", d_fixed, "depth for moe_fixed_cot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const SystemConfig cfg = load_or_exit(config_path);

    if (cmd_validate->parsed()) {
      std::cout << "config ok: " << config_path << "\n"
                << "config_hash: " << config_hash(cfg) << "\n"
                << "devices: " << cfg.n_devices << ", slots: " << cfg.n_slots
                << ", seed: " << cfg.seed << "\n";
      return 0;
    }

    if (cmd_run->parsed()) {
      const SchemeId scheme = scheme_or_exit(run_scheme);
      if (scheme == SchemeId::kMoeDynamic && run_ckpt.empty()) {
        std::cerr << "moe_dynamic requires --checkpoint\n";
        return kExitUsage;
      }
      namespace fs = std::filesystem;
      const std::string stem =
          scheme_name(scheme) + "_seed" + std::to_string(run_seed);
      RunManifest m;
      m.scheme = scheme;
      m.seed = run_seed;
      m.config_hash = config_hash(cfg);
      m.records_csv = (fs::path(run_out) / (stem + ".csv")).string();
      m.metrics_json = (fs::path(run_out) / (stem + ".json")).string();
      m.checkpoint_path = run_ckpt;
      m.d_fixed = d_fixed;
      const EpisodeMetrics metrics = run_scheme_to_files(cfg, m);
      std::printf(
          "%s seed=%llu: energy=%.3f J acc_sat=%.4f lat_sat=%.4f tasks=%lld "
          "failed=%lld\n",
          scheme_name(scheme).c_str(),
          static_cast<unsigned long long>(run_seed), metrics.total_energy,
          metrics.acc_sat_rate, metrics.lat_sat_rate, metrics.tasks,
          metrics.failed);
      return 0;
    }

    if (cmd_train->parsed()) {
      const TrainResult result = train_to_files(cfg, hp, train_seed, train_out);
      if (result.aborted) {
        std::cerr << "training aborted: " << result.abort_reason
                  << " (last good checkpoint retained)\n";
        return kExitRuntime;
      }
      const IterationLog& last = result.log.back();
      std::printf(
          "trained %zu iterations: mean_reward=%.4f lat_sat=%.4f "
          "acc_sat=%.4f\ncheckpoint: %s/checkpoint.json\n",
          result.log.size(), last.mean_reward, last.lat_sat, last.acc_sat,
          train_out.c_str());
      return 0;
    }

    if (cmd_compare->parsed()) {
      std::vector<SchemeId> schemes;
      std::size_t pos = 0;
      while (pos <= cmp_schemes.size()) {
        const auto comma = cmp_schemes.find(',', pos);
        const std::string tok = cmp_schemes.substr(
            pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) schemes.push_back(scheme_or_exit(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      const std::vector<std::uint64_t> seeds = parse_seeds(cmp_seeds);
      if (schemes.empty() || seeds.empty()) {
        std::cerr << "compare needs at least one scheme and one seed\n";
        return kExitUsage;
      }
      bool needs_ckpt = false;
      for (SchemeId s : schemes)
        needs_ckpt = needs_ckpt || s == SchemeId::kMoeDynamic;
      if (needs_ckpt && cmp_ckpt.empty()) {
        std::cerr << "moe_dynamic requires --checkpoint\n";
        return kExitUsage;
      }
      std::optional<std::string> ckpt;
      if (!cmp_ckpt.empty()) ckpt = cmp_ckpt;
      const auto rows =
          compare_to_files(cfg, schemes, seeds, ckpt, d_fixed, cmp_out);
      std::cout << format_summary_csv(cfg, rows);
      std::cout << "summary: " << cmp_out << "/summary.csv\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
