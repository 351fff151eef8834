#include "haif/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "haif/rng.hpp"

namespace haif {

std::pair<int, int> discretize(double x, double v, int pos_bins, int vel_bins,
                               const EnvConfig& cfg) {
  if (pos_bins < 1 || vel_bins < 1) throw std::invalid_argument("discretize: bad bin counts");
  auto bin = [](double value, double lo, double hi, int bins) {
    const int i = int(double(bins) * (value - lo) / (hi - lo));
    return std::clamp(i, 0, bins - 1);
  };
  return {bin(x, cfg.min_position, cfg.max_position, pos_bins),
          bin(v, -cfg.max_speed, cfg.max_speed, vel_bins)};
}

QTable::QTable(int pos_bins, int vel_bins, double lr, double gamma)
    : pos_bins_(pos_bins), vel_bins_(vel_bins), lr_(lr), gamma_(gamma),
      values_(Matrix::Zero(Index(pos_bins) * vel_bins, kNumActions)) {
  if (pos_bins < 1 || vel_bins < 1) throw std::invalid_argument("QTable: bad bin counts");
}

int QTable::cell_of(double x, double v, const EnvConfig& cfg) const {
  auto [i, j] = discretize(x, v, pos_bins_, vel_bins_, cfg);
  return i * vel_bins_ + j;
}

int QTable::greedy_action(int cell) const {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a)
    if (values_(cell, a) > values_(cell, best)) best = a;
  return best;
}

void QTable::update(int cell, int action, double reward, int next_cell, bool done) {
  double target = reward;
  if (!done) target += gamma_ * values_.row(next_cell).maxCoeff();
  values_(cell, action) += lr_ * (target - values_(cell, action));
}

RunResult run_q_learning_single(const QLearningConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  MountainCar env(cfg.env);
  QTable table(cfg.pos_bins, cfg.vel_bins, cfg.lr_start, cfg.gamma);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, kNumActions - 1);

  RunResult result;
  result.seed = seed;
  const int half = std::max(cfg.episodes / 2, 1);
  for (int e = 0; e < cfg.episodes; ++e) {
    const double frac = cfg.episodes > 1 ? double(e) / double(cfg.episodes - 1) : 1.0;
    table.set_lr(cfg.lr_start + (cfg.lr_end - cfg.lr_start) * frac);
    const double eps_frac = std::min(double(e) / double(half), 1.0);
    const double eps = cfg.eps_start + (cfg.eps_end - cfg.eps_start) * eps_frac;

    CarState s = env.reset(rng);
    int cell = table.cell_of(s.position, s.velocity, cfg.env);
    bool success = false;
    int steps = 0;
    while (!env.done()) {
      const int a = coin(rng) < eps ? random_action(rng) : table.greedy_action(cell);
      const StepResult r = env.step(static_cast<CarAction>(a));
      const int next_cell = table.cell_of(r.state.position, r.state.velocity, cfg.env);
      const double reward = r.success ? 0.0 : -1.0;
      table.update(cell, a, reward, next_cell, r.done);
      cell = next_cell;
      ++steps;
      if (r.done) success = r.success;
    }
    result.success.push_back(success ? 1 : 0);
    result.steps.push_back(steps);
  }
  return result;
}

CurveStats run_q_learning(const QLearningConfig& cfg, std::uint64_t master_seed, int ma_window) {
  std::vector<RunResult> results;
  results.reserve(size_t(cfg.seeds));
  for (int k = 0; k < cfg.seeds; ++k)
    results.push_back(run_q_learning_single(cfg, derive_seed(master_seed, 0x51ull, uint64_t(k))));
  return aggregate(results, ma_window);
}

int replay_train(HebbianAifAgent& agent, const ReplayBuffer& buffer, const ObsNormalizer& norm,
                 Rng& rng) {
  if (buffer.episodes.empty()) return -1;
  std::uniform_int_distribution<size_t> pick(0, buffer.episodes.size() - 1);
  const size_t idx = pick(rng);
  const EpisodeRecord& ep = buffer.episodes[idx];
  if (ep.obs.size() != ep.actions.size() + 1)
    throw std::invalid_argument("replay_train: malformed episode record");

  agent.begin_episode();
  for (size_t t = 0; t < ep.obs.size(); ++t) {
    agent.step_observe(norm.normalize(ep.obs[t].first, ep.obs[t].second));
    if (t < ep.actions.size()) agent.record_action(ep.actions[t]);
  }
  return int(idx);
}

} // namespace haif
