#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "haif/checkpoint.hpp"
#include "haif/harness.hpp"

namespace fs = std::filesystem;
using namespace haif;

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value config file");
  cmd->add_option("--seed", args.seed, "master seed (default 0)");
  cmd->add_option("--out", args.out_dir, "output directory (default .)");
  cmd->add_option("--set", args.overrides, "override config entries, key=value")
      ->take_all()
      ->expected(-1);
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  for (const auto& kv : args.overrides) apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

void write_runs_csv(const std::string& path, const std::vector<RunResult>& runs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "run,seed,episode,success,steps\n";
  for (size_t r = 0; r < runs.size(); ++r)
    for (size_t e = 0; e < runs[r].success.size(); ++e)
      out << r << ',' << runs[r].seed << ',' << (e + 1) << ',' << runs[r].success[e] << ','
          << runs[r].steps[e] << '\n';
}

int cmd_train(const CommonArgs& args, bool replay, bool dump_traj) {
  ExperimentConfig cfg = resolve_config(args);
  if (replay) cfg.replay = 1;
  fs::create_directories(args.out_dir);

  RunArtifacts artifacts;
  artifacts.want_trajectory = dump_traj;
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = run_experiment_suite(
      cfg, args.seed,
      [&](int k) {
        std::cout << "run " << k << " done ("
                  << std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count()
                  << "s)" << std::endl;
      },
      &artifacts);

  write_curve_csv((fs::path(args.out_dir) / "curve.csv").string(), result.curve);
  write_runs_csv((fs::path(args.out_dir) / "runs.csv").string(), result.runs);
  save_checkpoint((fs::path(args.out_dir) / "checkpoint.txt").string(),
                  make_checkpoint(cfg, *artifacts.agent, artifacts.normalizer));
  if (dump_traj)
    write_trajectory_csv((fs::path(args.out_dir) / "trajectory.csv").string(),
                         artifacts.trajectory);

  std::cout << "final 5-episode mean success: " << final_mean(result.curve) << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& param,
              const std::vector<std::string>& values) {
  SweepSpec spec;
  spec.param = param;
  spec.base = resolve_config(args);
  for (const auto& v : values) spec.values.push_back(std::stod(v));

  const auto points = sweep(spec, args.seed);
  for (size_t i = 0; i < points.size(); ++i) {
    const fs::path dir = fs::path(args.out_dir) / (param + "_" + values[i]);
    fs::create_directories(dir);
    write_curve_csv((dir / "curve.csv").string(), points[i].curve);
    std::cout << param << " = " << values[i]
              << "  final 5-episode mean: " << final_mean(points[i].curve) << "\n";
  }
  return 0;
}

int cmd_baseline_q(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  fs::create_directories(args.out_dir);
  const CurveStats curve = run_q_learning(cfg.q_config(), args.seed, cfg.ma_window);
  write_curve_csv((fs::path(args.out_dir) / "curve.csv").string(), curve);
  std::cout << "q-learning final 5-episode mean success: " << final_mean(curve) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hebbian active-inference agent on Mountain Car"};
  app.require_subcommand(1);

  CommonArgs train_args;
  bool replay = false, dump_traj = false;
  auto* train = app.add_subcommand("train", "run the multi-seed training experiment");
  add_common(train, train_args);
  train->add_flag("--replay", replay, "train with the episode replay buffer");
  train->add_flag("--dump-traj", dump_traj, "dump raw trajectories of the first run");

  CommonArgs sweep_args;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one hyperparameter");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');

  CommonArgs baseline_args;
  auto* baseline = app.add_subcommand("baseline", "run a baseline");
  std::string which;
  baseline->add_option("which", which, "baseline name (q)")->required();
  add_common(baseline, baseline_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_args, replay, dump_traj);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, sweep_param, sweep_values);
    if (baseline->parsed()) {
      if (which != "q") {
        std::cerr << "unknown baseline '" << which << "' (expected: q)\n";
        return 2;
      }
      return cmd_baseline_q(baseline_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
