#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "haif/planner.hpp"
#include "haif/rng.hpp"

using namespace haif;

namespace {

constexpr double kAlpha = 5.0;

TransitionNet make_net(int l_buf, Index state_dim, Index code_dim, Rng& rng,
                       double init_stddev = 0.01) {
  CodingConfig cfg{1e-4, 0.0, 100, 1e-3};
  return TransitionNet::create(l_buf, state_dim, 2, code_dim, cfg, kAlpha, init_stddev, rng);
}

Vector random_sphere_state(Index dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = gauss(rng);
  return kAlpha * v.normalized();
}

std::pair<std::vector<Vector>, std::vector<Vector>> random_seeds(const TransitionNet& net,
                                                                 Rng& rng) {
  std::vector<Vector> states, actions;
  for (int i = 0; i < net.l_buf; ++i) {
    states.push_back(random_sphere_state(net.state_dim, rng));
    actions.push_back(encode_action(int(rng() & 1ull)));
  }
  return {states, actions};
}

} // namespace

TEST_CASE("sample_policies: shape, determinism, and empirical frequency") {
  PlannerConfig cfg{100, 200, 10, 0.5};
  Rng rng = make_rng(13);
  const auto policies = sample_policies(rng, cfg);
  REQUIRE(policies.size() == 100);
  long ones = 0, total = 0;
  for (const auto& p : policies) {
    CHECK(p.actions.size() == 20);
    CHECK(p.repeat == 10);
    CHECK(p.horizon() == 200);
    for (int a : p.actions) {
      CHECK((a == 0 || a == 1));
      ones += a;
      total += 1;
    }
  }

  Rng replay_rng = make_rng(13);
  const auto again = sample_policies(replay_rng, cfg);
  for (size_t i = 0; i < policies.size(); ++i) CHECK(policies[i].actions == again[i].actions);

  PlannerConfig big{500, 200, 10, 0.5};
  Rng freq_rng = make_rng(17);
  for (const auto& p : sample_policies(freq_rng, big))
    for (int a : p.actions) {
      ones += a;
      total += 1;
    }
  const double freq = double(ones) / double(total);
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("planner config validation") {
  CHECK_THROWS(PlannerConfig{100, 201, 10, 0.5}.validate());
  CHECK_THROWS(PlannerConfig{0, 200, 10, 0.5}.validate());
  CHECK_THROWS(PlannerConfig{100, 200, 10, 1.5}.validate());
  PlannerConfig{100, 200, 10, 1.0}.validate();
}

TEST_CASE("rollout of an empty policy is an empty trace") {
  Rng rng = make_rng(19);
  TransitionNet net = make_net(2, 3, 8, rng);
  auto [states, actions] = random_seeds(net, rng);
  const RolloutTrace trace = rollout(net, states, actions, Policy{{}, 10});
  CHECK(trace.states.empty());
}

TEST_CASE("rollout keeps every state on the sphere (or zero)") {
  Rng rng = make_rng(23);
  TransitionNet net = make_net(3, 4, 16, rng);
  auto [states, actions] = random_seeds(net, rng);
  const Policy policy{{0, 1, 1, 0}, 5};
  const RolloutTrace trace = rollout(net, states, actions, policy);
  REQUIRE(trace.states.size() == 20);
  for (const auto& s : trace.states) {
    const double n = s.norm();
    CHECK((n == 0.0 || std::abs(n - kAlpha) <= 1e-9));
  }
}

TEST_CASE("rollout of a constant-trained net stays at the fixed point") {
  Rng rng = make_rng(29);
  TransitionNet net = make_net(2, 4, 24, rng);
  net.cfg.eta_d = 5e-3;
  const Vector s0 = random_sphere_state(4, rng);
  LagWindow w;
  w.states.assign(3, s0);
  w.actions.assign(2, encode_action(0));
  for (int i = 0; i < 400; ++i) learn_transition(net, w);

  const std::vector<Vector> seeds(2, s0);
  const std::vector<Vector> seed_actions(2, encode_action(0));
  const RolloutTrace trace = rollout(net, seeds, seed_actions, Policy{{0, 0, 0}, 4});
  for (const auto& s : trace.states)
    CHECK(s.dot(s0) / (s.norm() * s0.norm()) >= 0.99);
}

TEST_CASE("rollout leaves the dictionary untouched") {
  Rng rng = make_rng(31);
  TransitionNet net = make_net(3, 4, 16, rng);
  auto [states, actions] = random_seeds(net, rng);
  const Matrix before = net.dict.weights;
  rollout(net, states, actions, Policy{{1, 0, 1, 1}, 5});
  CHECK((net.dict.weights - before).norm() == 0.0);
}

TEST_CASE("score hand values and the two-pass variance oracle") {
  Vector s_star = Vector::Zero(2);
  RolloutTrace at_goal;
  at_goal.states.assign(4, s_star);
  const EFEScore zero = score(at_goal, s_star);
  CHECK(zero.goal_term == 0.0);
  CHECK(zero.variance == 0.0);

  Vector d(2);
  d << 0.0, 2.0;
  const EFEScore two = score_series(d);
  CHECK(two.goal_term == 2.0);
  CHECK(two.variance == 1.0);

  Rng rng = make_rng(37);
  std::normal_distribution<double> gauss(0.0, 3.0);
  Vector series(257);
  for (Index i = 0; i < series.size(); ++i) series(i) = gauss(rng) * gauss(rng);
  const EFEScore got = score_series(series.cwiseAbs());
  double sum = 0.0;
  for (Index i = 0; i < series.size(); ++i) sum += std::abs(series(i));
  const double mean = sum / double(series.size());
  double var = 0.0;
  for (Index i = 0; i < series.size(); ++i) {
    const double dd = std::abs(series(i)) - mean;
    var += dd * dd;
  }
  var /= double(series.size());
  CHECK(got.goal_term == doctest::Approx(sum).epsilon(1e-12));
  CHECK(got.variance == doctest::Approx(var).epsilon(1e-12));

  RolloutTrace empty;
  CHECK_THROWS(score(empty, s_star));
}

TEST_CASE("adaptive_threshold hand values") {
  CHECK(adaptive_threshold({2.0, 4.0}, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(adaptive_threshold({3.0, 3.0, 3.0}, 1.0) == doctest::Approx(3.0));
  CHECK(adaptive_threshold({1.0, 9.0}, 0.0) == 0.0);
  CHECK_THROWS(adaptive_threshold({}, 0.5));
}

TEST_CASE("select_policy applies the variance constraint with index tie-breaks") {
  const std::vector<EFEScore> scores{{10.0, 4.0}, {5.0, 1.0}, {7.0, 3.0}};
  CHECK(select_policy(scores, 1.5) == 2);
  CHECK(select_policy(scores, 0.0) == 1);
  CHECK(select_policy({{3.0, 1.0}}, 0.5) == 0);
  const std::vector<EFEScore> ties{{5.0, 2.0}, {5.0, 2.0}, {6.0, 2.0}};
  CHECK(select_policy(ties, 0.0) == 0);
}

TEST_CASE("feasibility: for beta <= 1 the constrained set is never empty") {
  Rng rng = make_rng(41);
  std::uniform_real_distribution<double> var_dist(0.0, 100.0);
  std::uniform_real_distribution<double> beta_dist(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 40);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> variances(size_t(count(rng)));
    for (auto& v : variances) v = var_dist(rng);
    const double t_v = adaptive_threshold(variances, beta_dist(rng));
    bool feasible = false;
    for (double v : variances) feasible = feasible || v >= t_v;
    CHECK(feasible);
  }
}

TEST_CASE("selection is invariant to a common positive scaling of the distances") {
  Rng rng = make_rng(43);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 12, len = 30;
    std::vector<Vector> series;
    for (int j = 0; j < n; ++j) {
      Vector d(len);
      for (int l = 0; l < len; ++l) d(l) = u(rng);
      series.push_back(d);
    }
    auto decide = [&](double scale) {
      std::vector<EFEScore> scores;
      std::vector<double> variances;
      for (const auto& d : series) {
        scores.push_back(score_series(scale * d));
        variances.push_back(scores.back().variance);
      }
      return select_policy(scores, adaptive_threshold(variances, 0.5));
    };
    const auto base = decide(1.0);
    CHECK(decide(3.7) == base);
    CHECK(decide(0.01) == base);
  }
}

TEST_CASE("batched distances match per-policy rollout + score") {
  Rng rng = make_rng(47);
  TransitionNet net = make_net(4, 5, 24, rng, 0.05);
  auto [states, actions] = random_seeds(net, rng);
  PlannerConfig cfg{8, 30, 5, 0.5};
  Rng prng = make_rng(53);
  const auto policies = sample_policies(prng, cfg);
  const Vector s_star = random_sphere_state(5, rng);

  const Matrix batch = rollout_distance_batch(net, states, actions, policies, s_star);
  REQUIRE(batch.rows() == 30);
  REQUIRE(batch.cols() == 8);
  for (size_t j = 0; j < policies.size(); ++j) {
    const RolloutTrace trace = rollout(net, states, actions, policies[j]);
    for (size_t l = 0; l < trace.states.size(); ++l) {
      const double d = (trace.states[l] - s_star).squaredNorm();
      CHECK(batch(Index(l), Index(j)) == doctest::Approx(d).epsilon(1e-9));
    }
  }
}

TEST_CASE("a zero transition dictionary still yields a full decision") {
  Rng rng = make_rng(59);
  TransitionNet net = make_net(2, 3, 8, rng);
  net.dict.weights.setZero();
  auto [states, actions] = random_seeds(net, rng);
  PlannerConfig cfg{5, 20, 5, 0.5};
  Rng prng = make_rng(61);
  const auto policies = sample_policies(prng, cfg);
  const Vector s_star = random_sphere_state(3, rng);
  const PolicyDecision d =
      evaluate_policies(net, states, actions, policies, s_star, cfg.beta);
  CHECK(d.selected == 0); // all scores equal, lowest index wins
  for (const auto& sc : d.scores) {
    CHECK(std::isfinite(sc.goal_term));
    CHECK(sc.variance == 0.0);
  }
}
