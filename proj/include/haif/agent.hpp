#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "haif/generative.hpp"
#include "haif/mountain_car.hpp"
#include "haif/planner.hpp"
#include "haif/types.hpp"

namespace haif {

struct AgentConfig {
  Index obs_dim = 2;
  Index action_dim = 2;
  Index m_q = 8;        // posterior code dim
  Index m_p = 64;       // transition code dim
  double lambda_q = 1e-5;
  double lambda_p = 1e-4;
  int l_buf = 20;
  int coding_iters = 100;
  double eta_c = 0.0; // auto
  double eta_d = 1e-4;
  double alpha = 5.0;
  double init_stddev = 0.01;
  double action_scale = 1.0; // magnitude of encoded actions fed to both nets
};

/// The two coupled ensembles plus the per-episode latent/action history.
/// Coding is a pure read; learning mutates the dictionaries in place.
class HebbianAifAgent {
public:
  HebbianAifAgent(const AgentConfig& cfg, Rng& rng);

  void begin_episode();

  /// Infer the latent state for the current normalized observation (paired
  /// with the previously executed action) and, from the second step of an
  /// episode on, run one transition + top-down posterior learning step.
  Vector step_observe(const Vector& obs_norm);

  /// Record the action just executed in the environment.
  void record_action(int action_id);

  /// Rollout seeds: the most recent l_buf latent states and executed actions,
  /// front-padded with copies of the earliest state and zero encodings while
  /// the episode is younger than the buffer.
  std::pair<std::vector<Vector>, std::vector<Vector>> seed_window() const;

  void set_learning(bool on) { learning_ = on; }
  bool learning() const { return learning_; }
  void decay_learning_rate(double factor);

  double eta_d() const { return eta_d_; }
  void set_eta_d(double eta);
  const PosteriorNet& posterior() const { return posterior_; }
  PosteriorNet& posterior() { return posterior_; }
  const TransitionNet& transition() const { return transition_; }
  TransitionNet& transition() { return transition_; }
  const AgentConfig& config() const { return cfg_; }

private:
  LagWindow learning_window() const;

  AgentConfig cfg_;
  PosteriorNet posterior_;
  TransitionNet transition_;
  double eta_d_;
  bool learning_ = true;
  std::deque<Vector> states_;  // newest at back
  std::deque<Vector> actions_; // newest at back
  Vector last_action_enc_;
};

struct EpisodeOutcome {
  bool success = false;
  int steps = 0;
  int decisions = 0;
};

/// Raw observation-action stream of one episode; obs has one more entry than
/// actions (the terminal observation closes the episode).
struct EpisodeRecord {
  std::vector<std::pair<double, double>> obs; // (x, v)
  std::vector<int> actions;
};

struct EpisodeOptions {
  PlannerConfig planner;
  GoalSpec goal;
  /// When non-null, plan decisions select from this fixed policy pool
  /// instead of sampling a fresh one.
  const std::vector<Policy>* policy_pool = nullptr;
  /// Keep the latent/action history from the previous episode instead of
  /// re-padding from the first observation.
  bool carry_history = false;
  /// Planning schedule: decisions happen at repeat-block boundaries with
  /// t < replan_until (the first step always plans). 0 selects one policy
  /// for the whole episode; a large value re-plans at every block
  /// (receding horizon), executing only the first action of each selection.
  int replan_until = 0;
  bool record_trajectory = false;
  std::vector<TrajectoryRow>* trajectory = nullptr;
  EpisodeRecord* record = nullptr;
  int episode_index = 0;
  double eta_decay = 0.8; // applied to eta_d after a successful episode
};

/// One full episode of receding-horizon control: at every repeat-block
/// boundary sample policies, roll them out through the frozen transition
/// net, score, threshold, select, then execute the selected policy's first
/// action for `repeat` steps while learning on every real transition.
EpisodeOutcome plan_and_act(HebbianAifAgent& agent, MountainCar& env,
                            const ObsNormalizer& norm, Rng& rng, const EpisodeOptions& opts);

/// Goal specification for Mountain Car: normalized goal position fixed,
/// normalized velocity swept over `grid_points` values in [-2, 2].
GoalSpec mountain_car_goal(const ObsNormalizer& norm, const EnvConfig& env_cfg,
                           int grid_points = 21);

} // namespace haif
