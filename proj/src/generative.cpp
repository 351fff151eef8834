#include "haif/generative.hpp"

#include <stdexcept>

namespace haif {

Vector encode_action(int action, int n_actions) {
  if (action < 0 || action >= n_actions)
    throw std::invalid_argument("encode_action: action id out of range");
  Vector e = Vector::Zero(n_actions);
  e(action) = 1.0;
  return e;
}

Vector zero_action(int n_actions) { return Vector::Zero(n_actions); }

Vector normalize_state(const Vector& s, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("normalize_state: alpha <= 0");
  const double n = s.norm();
  if (n == 0.0) return s;
  return (alpha / n) * s;
}

PosteriorNet PosteriorNet::create(Index obs_dim, Index action_dim, Index code_dim,
                                  const CodingConfig& cfg, double alpha, double init_stddev,
                                  Rng& rng) {
  PosteriorNet net;
  net.dict = Dictionary::random(obs_dim + action_dim, code_dim, init_stddev, rng);
  net.cfg = cfg;
  net.obs_dim = obs_dim;
  net.action_dim = action_dim;
  net.alpha = alpha;
  return net;
}

TransitionNet TransitionNet::create(int l_buf, Index state_dim, Index action_dim, Index code_dim,
                                    const CodingConfig& cfg, double alpha, double init_stddev,
                                    Rng& rng) {
  if (l_buf < 1) throw std::invalid_argument("TransitionNet: l_buf < 1");
  TransitionNet net;
  net.l_buf = l_buf;
  net.state_dim = state_dim;
  net.action_dim = action_dim;
  net.cfg = cfg;
  net.alpha = alpha;
  net.dict = Dictionary::random(net.window_dim(), code_dim, init_stddev, rng);
  return net;
}

Vector flatten(const LagWindow& window) {
  Index dim = 0;
  for (const auto& s : window.states) dim += s.size();
  for (const auto& a : window.actions) dim += a.size();
  Vector flat(dim);
  Index at = 0;
  for (const auto& s : window.states) {
    flat.segment(at, s.size()) = s;
    at += s.size();
  }
  for (const auto& a : window.actions) {
    flat.segment(at, a.size()) = a;
    at += a.size();
  }
  return flat;
}

void validate_window(const TransitionNet& net, const LagWindow& window) {
  if (Index(window.states.size()) != net.l_buf + 1 ||
      Index(window.actions.size()) != net.l_buf)
    throw std::invalid_argument("lag window under-filled");
  for (const auto& s : window.states)
    if (s.size() != net.state_dim) throw std::invalid_argument("lag window: bad state length");
  for (const auto& a : window.actions)
    if (a.size() != net.action_dim) throw std::invalid_argument("lag window: bad action length");
}

Vector infer_posterior(const PosteriorNet& net, const Vector& obs, const Vector& action_enc) {
  if (obs.size() != net.obs_dim || action_enc.size() != net.action_dim)
    throw std::invalid_argument("infer_posterior: observation/action length mismatch");
  Vector input(net.obs_dim + net.action_dim);
  input << obs, action_enc;
  return normalize_state(code(net.dict, input, net.cfg), net.alpha);
}

Vector learn_transition(TransitionNet& net, const LagWindow& window) {
  validate_window(net, window);
  const Vector target = flatten(window);
  Vector c_s = code(net.dict, target, net.cfg);
  hebbian_step(net.dict, c_s, target, net.cfg.eta_d);
  return c_s;
}

Vector predict_next(const TransitionNet& net, const std::vector<Vector>& lag_states,
                    const std::vector<Vector>& lag_actions) {
  if (Index(lag_states.size()) != net.l_buf || Index(lag_actions.size()) != net.l_buf)
    throw std::invalid_argument("predict_next: need exactly l_buf states and actions");

  const Index dim = net.window_dim();
  const Index slot = net.next_slot_offset();
  Vector partial = Vector::Zero(dim);
  std::vector<bool> mask(size_t(dim), true);
  Index at = 0;
  for (const auto& s : lag_states) {
    if (s.size() != net.state_dim) throw std::invalid_argument("predict_next: bad state length");
    partial.segment(at, net.state_dim) = s;
    at += net.state_dim;
  }
  for (Index i = 0; i < net.state_dim; ++i) mask[size_t(slot + i)] = false;
  at = slot + net.state_dim;
  for (const auto& a : lag_actions) {
    if (a.size() != net.action_dim)
      throw std::invalid_argument("predict_next: bad action length");
    partial.segment(at, net.action_dim) = a;
    at += net.action_dim;
  }

  const Vector c_s = code_masked(net.dict, partial, mask, net.cfg);
  const Vector s_hat = net.dict.weights.middleRows(slot, net.state_dim) * c_s;
  return normalize_state(s_hat, net.alpha);
}

Vector topdown_target(const TransitionNet& net, const Vector& c_s) {
  if (c_s.size() != net.code_dim())
    throw std::invalid_argument("topdown_target: code length mismatch");
  const Vector slot = net.dict.weights.middleRows(net.next_slot_offset(), net.state_dim) * c_s;
  return normalize_state(slot, net.alpha);
}

void learn_posterior(PosteriorNet& net, const Vector& obs, const Vector& action_enc,
                     const Vector& s, const Vector& v) {
  if (obs.size() != net.obs_dim || action_enc.size() != net.action_dim)
    throw std::invalid_argument("learn_posterior: observation/action length mismatch");
  if (s.size() != net.code_dim() || v.size() != net.code_dim())
    throw std::invalid_argument("learn_posterior: code length mismatch");
  Vector target(net.obs_dim + net.action_dim);
  target << obs, action_enc;
  // Both rank-1 terms are evaluated at the same weights before either is
  // applied (the combined gradient of the two quadratic terms).
  const Vector scaled_s = net.cfg.eta_d * (net.dict.weights * s - target);
  const Vector scaled_v = net.cfg.eta_d * (net.dict.weights * v - target);
  net.dict.weights.noalias() -= scaled_s * s.transpose();
  net.dict.weights.noalias() -= scaled_v * v.transpose();
}

Vector estimate_goal_state(const PosteriorNet& net, const GoalSpec& goal,
                           const std::vector<Vector>& action_encodings) {
  if (goal.grid.empty()) throw std::invalid_argument("estimate_goal_state: empty grid");
  if (action_encodings.empty())
    throw std::invalid_argument("estimate_goal_state: empty action set");
  if (goal.goal_obs.size() != net.obs_dim)
    throw std::invalid_argument("estimate_goal_state: goal observation length mismatch");
  for (Index d : goal.free_dims)
    if (d < 0 || d >= net.obs_dim)
      throw std::invalid_argument("estimate_goal_state: free dim out of range");

  Vector sum = Vector::Zero(net.code_dim());
  Vector obs = goal.goal_obs;
  for (double w : goal.grid) {
    for (Index d : goal.free_dims) obs(d) = w;
    for (const auto& a : action_encodings) sum += infer_posterior(net, obs, a);
  }
  sum /= double(goal.grid.size() * action_encodings.size());
  return normalize_state(sum, net.alpha);
}

} // namespace haif
