#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "haif/agent.hpp"
#include "haif/mountain_car.hpp"
#include "haif/stats.hpp"
#include "haif/types.hpp"

namespace haif {

struct QLearningConfig {
  int pos_bins = 20;
  int vel_bins = 20;
  double lr_start = 0.1;
  double lr_end = 0.01; // linear decay across the episode budget
  double gamma = 0.99;
  double eps_start = 1.0;
  double eps_end = 0.05; // linear decay over the first half of training
  int episodes = 5000;
  int seeds = 10;
  EnvConfig env;
};

/// Uniform binning of (position, velocity) over the state bounds;
/// out-of-range observations clamp to the edge bins.
std::pair<int, int> discretize(double x, double v, int pos_bins, int vel_bins,
                               const EnvConfig& cfg = {});

/// Tabular action values, [pos_bins x vel_bins] cells by 2 actions.
class QTable {
public:
  QTable(int pos_bins, int vel_bins, double lr, double gamma);

  double& value(int cell, int action) { return values_(cell, action); }
  double value(int cell, int action) const { return values_(cell, action); }
  int cell_of(double x, double v, const EnvConfig& cfg = {}) const;
  int greedy_action(int cell) const;

  /// Q[s,a] += lr * (r + gamma * max_a' Q[s',a'] * (1-done) - Q[s,a])
  void update(int cell, int action, double reward, int next_cell, bool done);

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  double gamma() const { return gamma_; }
  const Matrix& values() const { return values_; }

private:
  int pos_bins_;
  int vel_bins_;
  double lr_;
  double gamma_;
  Matrix values_; // (pos_bins * vel_bins) x 2
};

/// Epsilon-greedy Q-learning on Mountain Car with reward -1 per step (0 on
/// reaching the goal), emitting the same curve statistics as the agent
/// harness.
CurveStats run_q_learning(const QLearningConfig& cfg, std::uint64_t master_seed,
                          int ma_window = 5);

RunResult run_q_learning_single(const QLearningConfig& cfg, std::uint64_t seed);

struct ReplayBuffer {
  std::vector<EpisodeRecord> episodes;
};

/// Replay one uniformly sampled stored episode through the agent's learning
/// path: no environment interaction, no planning. Returns the sampled index,
/// or -1 when the buffer is empty (first episode) and nothing was replayed.
int replay_train(HebbianAifAgent& agent, const ReplayBuffer& buffer, const ObsNormalizer& norm,
                 Rng& rng);

} // namespace haif
