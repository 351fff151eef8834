#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "haif/baselines.hpp"
#include "haif/rng.hpp"

using namespace haif;

TEST_CASE("discretize maps corners and midpoint to the expected cells") {
  CHECK(discretize(-1.2, -0.07, 20, 20) == std::pair<int, int>{0, 0});
  CHECK(discretize(0.6, 0.07, 20, 20) == std::pair<int, int>{19, 19});
  CHECK(discretize(-0.3, 0.0, 20, 20) == std::pair<int, int>{10, 10});
  // out-of-bounds clamps to edge bins
  CHECK(discretize(-5.0, 0.2, 20, 20) == std::pair<int, int>{0, 19});
}

TEST_CASE("q_update hand values") {
  QTable table(4, 4, 0.1, 0.9);
  const int s = table.cell_of(-0.5, 0.0);
  table.update(s, 1, -1.0, table.cell_of(-0.49, 0.001), false);
  CHECK(table.value(s, 1) == doctest::Approx(-0.1).epsilon(1e-15));

  QTable frozen(4, 4, 0.0, 0.9);
  frozen.update(s, 0, -1.0, s, false);
  CHECK(frozen.value(s, 0) == 0.0);
}

TEST_CASE("q_update converges to the analytic fixed point of a 2-state chain") {
  // Chain: A --fwd--> B --fwd--> goal (episode ends), reward -1 per step;
  // the other action self-loops with reward -1.
  // Q*(B,fwd) = -1; Q*(B,stay) = -1 + g*max_a Q*(B,a) = -1 - g
  // Q*(A,fwd) = -1 + g*Q*(B,fwd) = -1 - g
  // Q*(A,stay) = -1 + g*max_a Q*(A,a) = -1 + g*Q*(A,fwd)
  const double g = 0.9;
  QTable table(2, 1, 0.5, g);
  const int a_cell = 0, b_cell = 1;
  const int kFwd = 1, kStay = 0;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    table.update(a_cell, kFwd, -1.0, b_cell, false);
    table.update(a_cell, kStay, -1.0, a_cell, false);
    table.update(b_cell, kFwd, -1.0, b_cell, true);
    table.update(b_cell, kStay, -1.0, b_cell, false);
  }
  CHECK(table.value(b_cell, kFwd) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(table.value(b_cell, kStay) == doctest::Approx(-1.0 - g).epsilon(1e-6));
  CHECK(table.value(a_cell, kFwd) == doctest::Approx(-1.0 - g).epsilon(1e-6));
  CHECK(table.value(a_cell, kStay) == doctest::Approx(-1.0 + g * (-1.0 - g)).epsilon(1e-6));
}

TEST_CASE("pure random exploration almost never solves the task") {
  QLearningConfig cfg;
  cfg.episodes = 100;
  cfg.eps_start = 1.0;
  cfg.eps_end = 1.0;
  const RunResult r = run_q_learning_single(cfg, 99);
  double rate = 0.0;
  for (int s : r.success) rate += s;
  rate /= double(r.success.size());
  CHECK(rate <= 0.05);
}

TEST_CASE("q-learning is deterministic under a fixed seed and emits full curves") {
  QLearningConfig cfg;
  cfg.episodes = 120;
  cfg.seeds = 2;
  const RunResult a = run_q_learning_single(cfg, 7);
  const RunResult b = run_q_learning_single(cfg, 7);
  CHECK(a.success == b.success);
  CHECK(a.steps == b.steps);

  const CurveStats curve = run_q_learning(cfg, 3, 5);
  CHECK(curve.ma_mean.size() == 120);
}

TEST_CASE("q-values stay within the discounted-return bounds") {
  QLearningConfig cfg;
  cfg.episodes = 300;
  const double bound = 1.0 / (1.0 - cfg.gamma);
  Rng rng = make_rng(15);
  MountainCar env(cfg.env);
  QTable table(cfg.pos_bins, cfg.vel_bins, cfg.lr_start, cfg.gamma);
  for (int e = 0; e < cfg.episodes; ++e) {
    CarState s = env.reset(rng);
    int cell = table.cell_of(s.position, s.velocity);
    while (!env.done()) {
      const int a = int(rng() & 1ull);
      const StepResult r = env.step(static_cast<CarAction>(a));
      const int next = table.cell_of(r.state.position, r.state.velocity);
      table.update(cell, a, r.success ? 0.0 : -1.0, next, r.done);
      cell = next;
    }
  }
  CHECK(table.values().maxCoeff() <= 0.0);
  CHECK(table.values().minCoeff() >= -bound);
}

TEST_CASE("replay_train skips an empty buffer and replays a stored episode") {
  Rng rng = make_rng(17);
  AgentConfig cfg;
  cfg.m_p = 16;
  cfg.l_buf = 4;
  cfg.coding_iters = 30;
  HebbianAifAgent agent(cfg, rng);
  const ObsNormalizer norm{-0.5, 0.2, 0.0, 0.02};

  ReplayBuffer buffer;
  CHECK(replay_train(agent, buffer, norm, rng) == -1);

  EpisodeRecord ep;
  for (int t = 0; t <= 12; ++t) {
    ep.obs.emplace_back(-0.5 + 0.01 * t, 0.01);
    if (t < 12) ep.actions.push_back(t % 2);
  }
  buffer.episodes.push_back(ep);

  const Matrix post_before = agent.posterior().dict.weights;
  const Matrix trans_before = agent.transition().dict.weights;
  CHECK(replay_train(agent, buffer, norm, rng) == 0);
  CHECK((agent.posterior().dict.weights - post_before).norm() > 0.0);
  CHECK((agent.transition().dict.weights - trans_before).norm() > 0.0);
  CHECK(buffer.episodes.size() == 1); // buffer untouched
}

TEST_CASE("replay with a vanishing learning rate is a weight no-op") {
  Rng rng = make_rng(19);
  AgentConfig cfg;
  cfg.m_p = 16;
  cfg.l_buf = 4;
  cfg.coding_iters = 30;
  HebbianAifAgent agent(cfg, rng);
  agent.set_eta_d(0.0);
  const ObsNormalizer norm{-0.5, 0.2, 0.0, 0.02};

  ReplayBuffer buffer;
  EpisodeRecord ep;
  for (int t = 0; t <= 8; ++t) {
    ep.obs.emplace_back(-0.45 - 0.005 * t, -0.005);
    if (t < 8) ep.actions.push_back(0);
  }
  buffer.episodes.push_back(ep);

  const Matrix post_before = agent.posterior().dict.weights;
  const Matrix trans_before = agent.transition().dict.weights;
  replay_train(agent, buffer, norm, rng);
  CHECK((agent.posterior().dict.weights - post_before).norm() == 0.0);
  CHECK((agent.transition().dict.weights - trans_before).norm() == 0.0);
}
