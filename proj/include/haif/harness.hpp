#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "haif/agent.hpp"
#include "haif/baselines.hpp"
#include "haif/stats.hpp"

namespace haif {

/// Every experiment hyperparameter, addressable by the key names used in
/// config files, --set overrides and sweep specs.
struct ExperimentConfig {
  // model
  int m_q = 8;
  int m_p = 64;
  double lambda_q = 1e-5;
  double lambda_p = 1e-4;
  int l_buf = 20;
  int coding_iters = 100;
  double eta_c = 0.0; // <= 0 selects the automatic step size
  double eta_d = 1e-4;
  double decay = 0.8;
  double alpha = 5.0;
  double action_scale = 1.0;
  // planner
  double beta = 0.5;
  int n_policies = 100;
  int horizon = 200;
  int repeat = 10;
  // protocol
  int episodes = 35;
  int seeds = 10;
  int ma_window = 5;
  int normalizer_episodes = 10;
  int goal_grid = 21;
  int replay = 0;  // train with the episode replay buffer
  int replan = 0;  // 1: re-plan at every repeat block (receding horizon)
  int fixed_policies = 0; // 1: sample the policy pool once per run
  int carry_history = 0;  // 1: keep the latent/action history across episodes
  // q-learning baseline
  int q_episodes = 5000;
  int q_pos_bins = 20;
  int q_vel_bins = 20;
  double q_lr_start = 0.1;
  double q_lr_end = 0.01;
  double q_gamma = 0.99;
  double q_eps_start = 1.0;
  double q_eps_end = 0.05;

  void validate() const;

  AgentConfig agent_config() const;
  PlannerConfig planner_config() const;
  QLearningConfig q_config() const;

  static const std::vector<std::string>& keys();
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  std::string get(const std::string& key) const;
};

/// Flat key-value config file: one `key = value` per line, '#' comments.
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key_equals_value);
std::string serialize_config(const ExperimentConfig& cfg);

/// Optional byproducts of a run: the trained agent, the fitted normalizer,
/// and (when requested) the raw trajectories.
struct RunArtifacts {
  std::unique_ptr<HebbianAifAgent> agent;
  ObsNormalizer normalizer;
  bool want_trajectory = false;
  std::vector<TrajectoryRow> trajectory;
};

/// One seeded run: fresh agent and normalizer, `episodes` sequential
/// learning episodes of plan_and_act (with optional replay training between
/// episodes), outcomes recorded per episode.
RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         RunArtifacts* artifacts = nullptr);

/// cfg.seeds runs with seeds derived from (master_seed, run index), executed
/// on the worker pool, plus their aggregate curve. When `artifacts` is given
/// it receives the first run's agent and normalizer.
struct ExperimentResult {
  std::vector<RunResult> runs;
  CurveStats curve;
};
ExperimentResult run_experiment_suite(const ExperimentConfig& cfg, std::uint64_t master_seed,
                                      std::function<void(int)> on_run_done = {},
                                      RunArtifacts* artifacts = nullptr);

struct SweepSpec {
  std::string param;
  std::vector<double> values;
  ExperimentConfig base;
};

struct SweepPoint {
  double value = 0.0;
  CurveStats curve;
};
/// Full multi-seed experiment per swept value; each value gets RNG streams
/// derived from (master seed, value index).
std::vector<SweepPoint> sweep(const SweepSpec& spec, std::uint64_t master_seed);

/// Mean ma_mean over the final `span` episodes of a curve.
double final_mean(const CurveStats& stats, int span = 5);

/// Worker count: HAIF_WORKERS if set, else hardware concurrency.
int worker_count();

/// Run `jobs` indexed tasks on `workers` threads; task order is observable
/// only through the index, so results are placement-deterministic.
void parallel_for(int jobs, int workers, const std::function<void(int)>& fn);

} // namespace haif
