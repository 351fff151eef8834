#pragma once

#include <cstddef>
#include <vector>

#include "haif/generative.hpp"
#include "haif/types.hpp"

namespace haif {

/// Candidate action sequence; each entry is held for `repeat` consecutive
/// environment steps, so the rollout horizon is actions.size() * repeat.
struct Policy {
  std::vector<int> actions;
  int repeat = 10;

  int horizon() const { return int(actions.size()) * repeat; }
};

struct RolloutTrace {
  std::vector<Vector> states;
};

/// Expected-free-energy surrogate of one rollout: summed squared distance to
/// the goal state, and the population variance of that distance series.
struct EFEScore {
  double goal_term = 0.0;
  double variance = 0.0;
};

struct PlannerConfig {
  int n_policies = 100;
  int horizon = 200; // L
  int repeat = 10;
  double beta = 0.5;

  void validate() const;
};

/// n_policies random policies of horizon/repeat actions each, every action
/// i.i.d. uniform over the two-action set.
std::vector<Policy> sample_policies(Rng& rng, const PlannerConfig& cfg);

/// Open-loop latent trajectory under one policy: predict_next iterated
/// policy.horizon() times, sliding the lag window with each predicted state
/// and the repeat-expanded policy actions. Seeds are the agent's l_buf most
/// recent real states and executed actions; weights stay frozen.
RolloutTrace rollout(const TransitionNet& net, const std::vector<Vector>& seed_states,
                     const std::vector<Vector>& seed_actions, const Policy& policy);

/// Goal term and variance of the distance series d_l = ||s_l - s*||^2.
EFEScore score(const RolloutTrace& trace, const Vector& s_star);
EFEScore score_series(const Eigen::Ref<const Vector>& distances);

/// Adaptive variance threshold t_v = beta * (max + min) / 2.
double adaptive_threshold(const std::vector<double>& variances, double beta);

/// Index of the minimal-goal-term policy among those with variance >= t_v;
/// ties resolve to the lowest index. Falls back to the global argmin of the
/// goal term if the constraint filters out every policy.
std::size_t select_policy(const std::vector<EFEScore>& scores, double t_v);

/// Distance series of every policy rolled out simultaneously; column j is
/// policy j's series. Matches per-policy rollout + score to floating-point
/// noise, at a fraction of the cost (one Gram matrix shared by the whole
/// batch, one GEMM per coding iteration).
Matrix rollout_distance_batch(const TransitionNet& net, const std::vector<Vector>& seed_states,
                              const std::vector<Vector>& seed_actions,
                              const std::vector<Policy>& policies, const Vector& s_star);

struct PolicyDecision {
  std::vector<EFEScore> scores;
  double threshold = 0.0;
  std::size_t selected = 0;
};

/// Full decision step: batched rollouts, scoring, adaptive threshold, and
/// constrained selection.
PolicyDecision evaluate_policies(const TransitionNet& net, const std::vector<Vector>& seed_states,
                                 const std::vector<Vector>& seed_actions,
                                 const std::vector<Policy>& policies, const Vector& s_star,
                                 double beta);

} // namespace haif
