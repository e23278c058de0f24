#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bistab/config.hpp"
#include "bistab/evalrunner.hpp"
#include "bistab/trainer.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Hybrid biped stabilizer lab: analytical LIP/DCM control with learned residuals"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment configuration file (JSON)");
    cmd->add_option("--seed", seed, "Master seed")->required();
    cmd->add_option("--out", out_dir, "Output directory");
  };

  std::string ratio;
  std::string scenario = "l1";
  std::string ckpt;
  int episodes = -1;
  double threshold = 0.5;
  double duration = 500.0;

  CLI::App* train = app.add_subcommand("train", "Train residual policies with PPO");
  add_common(train);
  train->add_option("--ratio", ratio, "Symmetry ratio: 0, 1/8, 1/4, 1/2, 1");
  train->add_option("--scenario", scenario, "Scenario: l1, l2, t1");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint (or the baseline)");
  add_common(eval);
  eval->add_option("--checkpoint", ckpt, "Checkpoint file; omit for the analytical baseline");
  eval->add_option("--scenario", scenario, "Scenario: l1, l2, t1");
  eval->add_option("--episodes", episodes, "Episode count (default from config)");

  CLI::App* radial = app.add_subcommand("radial", "Radial push-tolerance sweep");
  add_common(radial);
  radial->add_option("--checkpoint", ckpt, "Checkpoint file; omit for the baseline");
  radial->add_option("--threshold", threshold, "Recovery-rate threshold");

  CLI::App* drift = app.add_subcommand("drift", "Position drift while walking in place");
  add_common(drift);
  drift->add_option("--checkpoint", ckpt, "Checkpoint file; omit for the baseline");
  drift->add_option("--duration", duration, "Walk duration (s)");

  CLI::App* noise = app.add_subcommand("noise", "Observation-noise robustness sweep");
  add_common(noise);
  noise->add_option("--checkpoint", ckpt, "Checkpoint file; omit for the baseline");
  noise->add_option("--scenario", scenario, "Scenario: l1, l2, t1");

  CLI11_PARSE(app, argc, argv);

  try {
    bistab::config::ExperimentConfig cfg = config_path.empty()
                                               ? bistab::config::ExperimentConfig::defaults()
                                               : bistab::config::load_config(config_path);
    const fs::path out(out_dir);
    fs::create_directories(out);
    const std::optional<fs::path> ckpt_path =
        ckpt.empty() ? std::nullopt : std::optional<fs::path>(ckpt);

    if (*train) {
      if (!ratio.empty()) cfg.train.symmetry_ratio = bistab::config::parse_ratio(ratio);
      if (train->count("--scenario"))
        cfg.scenario = bistab::plant::ScenarioSpec::preset(
            bistab::config::parse_scenario_kind(scenario));
      const auto result = bistab::train::run_train(cfg, seed, out);
      std::printf("trained %lld steps, %d episodes, checkpoint: %s\n",
                  static_cast<long long>(result.env_steps), result.episodes_completed,
                  result.final_checkpoint.string().c_str());
    } else if (*eval) {
      const auto actor = bistab::eval::make_actor(cfg, ckpt_path);
      const auto kind = bistab::config::parse_scenario_kind(scenario);
      const int n = episodes > 0 ? episodes : cfg.eval.episodes;
      const auto report =
          bistab::eval::run_eval(cfg, *actor, kind, n, seed, out / "eval.csv");
      std::printf("scenario=%s episodes=%d mean_duration=%.3fs mean_nni=%.4f mean_msi=%.4f\n",
                  scenario.c_str(), report.episodes, report.mean_duration, report.mean_nni,
                  report.mean_msi);
    } else if (*radial) {
      cfg.eval.radial_threshold = threshold;
      const auto actor = bistab::eval::make_actor(cfg, ckpt_path);
      const auto points = bistab::eval::run_radial(cfg, *actor, seed, out / "radial.csv");
      std::printf("radial sweep: %zu directions written to %s\n", points.size(),
                  (out / "radial.csv").string().c_str());
    } else if (*drift) {
      const auto actor = bistab::eval::make_actor(cfg, ckpt_path);
      const auto result =
          bistab::eval::run_drift(cfg, *actor, duration, seed, out / "drift.csv");
      std::printf("drift: total distance %.3fm over %.0fs%s\n", result.total_distance, duration,
                  result.fell ? " (fell)" : "");
    } else if (*noise) {
      const auto actor = bistab::eval::make_actor(cfg, ckpt_path);
      const auto kind = bistab::config::parse_scenario_kind(scenario);
      const auto points =
          bistab::eval::run_noise_sweep(cfg, *actor, kind, seed, out / "noise.csv");
      std::printf("noise sweep: %zu levels written to %s\n", points.size(),
                  (out / "noise.csv").string().c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
