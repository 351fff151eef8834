#include "haif/agent.hpp"

#include <stdexcept>

namespace haif {

HebbianAifAgent::HebbianAifAgent(const AgentConfig& cfg, Rng& rng)
    : cfg_(cfg), eta_d_(cfg.eta_d) {
  CodingConfig post_cfg{cfg.lambda_q, cfg.eta_c, cfg.coding_iters, cfg.eta_d};
  CodingConfig trans_cfg{cfg.lambda_p, cfg.eta_c, cfg.coding_iters, cfg.eta_d};
  posterior_ = PosteriorNet::create(cfg.obs_dim, cfg.action_dim, cfg.m_q, post_cfg, cfg.alpha,
                                    cfg.init_stddev, rng);
  transition_ = TransitionNet::create(cfg.l_buf, cfg.m_q, cfg.action_dim, cfg.m_p, trans_cfg,
                                      cfg.alpha, cfg.init_stddev, rng);
  transition_.action_scale = cfg.action_scale;
  last_action_enc_ = zero_action(int(cfg.action_dim));
}

void HebbianAifAgent::begin_episode() {
  states_.clear();
  actions_.clear();
  last_action_enc_ = zero_action(int(cfg_.action_dim));
}

void HebbianAifAgent::set_eta_d(double eta) {
  eta_d_ = eta;
  posterior_.cfg.eta_d = eta;
  transition_.cfg.eta_d = eta;
}

void HebbianAifAgent::decay_learning_rate(double factor) { set_eta_d(eta_d_ * factor); }

LagWindow HebbianAifAgent::learning_window() const {
  LagWindow w;
  const int n_states = cfg_.l_buf + 1;
  const int missing_s = n_states - int(states_.size());
  for (int i = 0; i < missing_s; ++i) w.states.push_back(states_.front());
  for (const auto& s : states_) w.states.push_back(s);

  const int missing_a = cfg_.l_buf - int(actions_.size());
  for (int i = 0; i < missing_a; ++i) w.actions.push_back(zero_action(int(cfg_.action_dim)));
  for (const auto& a : actions_) w.actions.push_back(a);
  return w;
}

Vector HebbianAifAgent::step_observe(const Vector& obs_norm) {
  Vector s = infer_posterior(posterior_, obs_norm, last_action_enc_);
  states_.push_back(s);
  while (int(states_.size()) > cfg_.l_buf + 1) states_.pop_front();

  if (states_.size() >= 2 && learning_) {
    const LagWindow window = learning_window();
    const Vector c_s = learn_transition(transition_, window);
    const Vector v = topdown_target(transition_, c_s);
    learn_posterior(posterior_, obs_norm, last_action_enc_, s, v);
  }
  return s;
}

void HebbianAifAgent::record_action(int action_id) {
  last_action_enc_ = cfg_.action_scale * encode_action(action_id, int(cfg_.action_dim));
  actions_.push_back(last_action_enc_);
  while (int(actions_.size()) > cfg_.l_buf) actions_.pop_front();
}

std::pair<std::vector<Vector>, std::vector<Vector>> HebbianAifAgent::seed_window() const {
  if (states_.empty())
    throw std::logic_error("seed_window: no latent state observed yet");
  std::vector<Vector> states, actions;
  const int missing_s = cfg_.l_buf - int(states_.size());
  for (int i = 0; i < std::max(missing_s, 0); ++i) states.push_back(states_.front());
  for (size_t i = states_.size() > size_t(cfg_.l_buf) ? states_.size() - size_t(cfg_.l_buf) : 0;
       i < states_.size(); ++i)
    states.push_back(states_[i]);

  const int missing_a = cfg_.l_buf - int(actions_.size());
  for (int i = 0; i < std::max(missing_a, 0); ++i)
    actions.push_back(zero_action(int(cfg_.action_dim)));
  for (const auto& a : actions_) actions.push_back(a);
  return {std::move(states), std::move(actions)};
}

GoalSpec mountain_car_goal(const ObsNormalizer& norm, const EnvConfig& env_cfg, int grid_points) {
  GoalSpec goal;
  goal.goal_obs = norm.normalize(env_cfg.goal_position, 0.0);
  goal.free_dims = {1};
  goal.grid.resize(size_t(grid_points));
  for (int i = 0; i < grid_points; ++i)
    goal.grid[size_t(i)] =
        grid_points == 1 ? 0.0 : -2.0 + 4.0 * double(i) / double(grid_points - 1);
  return goal;
}

EpisodeOutcome plan_and_act(HebbianAifAgent& agent, MountainCar& env, const ObsNormalizer& norm,
                            Rng& rng, const EpisodeOptions& opts) {
  opts.planner.validate();
  if (!opts.carry_history) agent.begin_episode();

  std::vector<Vector> action_encodings;
  for (int a = 0; a < kNumActions; ++a)
    action_encodings.push_back(agent.config().action_scale * encode_action(a));

  EpisodeOutcome outcome;
  CarState state = env.reset(rng);
  if (opts.record) opts.record->obs.emplace_back(state.position, state.velocity);
  int current_action = 0;
  Policy committed;
  int committed_at = 0;
  for (int t = 0; !env.done(); ++t) {
    const Vector obs = norm.normalize(state.position, state.velocity);
    agent.step_observe(obs);

    if (t % opts.planner.repeat == 0 && (t == 0 || t < opts.replan_until)) {
      const Vector s_star = estimate_goal_state(agent.posterior(), opts.goal, action_encodings);
      const std::vector<Policy> policies =
          opts.policy_pool ? *opts.policy_pool : sample_policies(rng, opts.planner);
      auto [seed_states, seed_actions] = agent.seed_window();
      const PolicyDecision decision = evaluate_policies(
          agent.transition(), seed_states, seed_actions, policies, s_star, opts.planner.beta);
      committed = policies[decision.selected];
      committed_at = t;
      ++outcome.decisions;
    }
    const size_t block = size_t((t - committed_at) / opts.planner.repeat);
    current_action = committed.actions[block % committed.actions.size()];

    const StepResult r = env.step(static_cast<CarAction>(current_action));
    agent.record_action(current_action);
    ++outcome.steps;
    if (opts.record) {
      opts.record->actions.push_back(current_action);
      opts.record->obs.emplace_back(r.state.position, r.state.velocity);
    }
    if (opts.record_trajectory && opts.trajectory)
      opts.trajectory->push_back({opts.episode_index, r.state.t, r.state.position,
                                  r.state.velocity, current_action, r.done});
    state = r.state;
    if (r.done) {
      // Learn on the final transition as well; the terminal observation is
      // real experience even though no further action follows.
      agent.step_observe(norm.normalize(state.position, state.velocity));
      outcome.success = r.success;
      break;
    }
  }

  if (outcome.success && agent.learning()) agent.decay_learning_rate(opts.eta_decay);
  return outcome;
}

} // namespace haif
