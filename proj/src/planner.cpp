#include "haif/planner.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "haif/sparse_coding.hpp"

namespace haif {

void PlannerConfig::validate() const {
  if (n_policies < 1) throw std::invalid_argument("PlannerConfig: n_policies < 1");
  if (repeat < 1) throw std::invalid_argument("PlannerConfig: repeat < 1");
  if (horizon < 1) throw std::invalid_argument("PlannerConfig: horizon < 1");
  if (horizon % repeat != 0)
    throw std::invalid_argument("PlannerConfig: horizon not divisible by repeat");
  if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("PlannerConfig: beta outside (0, 1]");
}

std::vector<Policy> sample_policies(Rng& rng, const PlannerConfig& cfg) {
  cfg.validate();
  const int len = cfg.horizon / cfg.repeat;
  std::vector<Policy> policies(size_t(cfg.n_policies));
  for (auto& p : policies) {
    p.repeat = cfg.repeat;
    p.actions.resize(size_t(len));
    for (int& a : p.actions) a = int(rng() & 1ull);
  }
  return policies;
}

RolloutTrace rollout(const TransitionNet& net, const std::vector<Vector>& seed_states,
                     const std::vector<Vector>& seed_actions, const Policy& policy) {
  if (Index(seed_states.size()) != net.l_buf || Index(seed_actions.size()) != net.l_buf)
    throw std::invalid_argument("rollout: need exactly l_buf seed states and actions");

  std::vector<Vector> states = seed_states;
  std::vector<Vector> actions = seed_actions;
  RolloutTrace trace;
  trace.states.reserve(size_t(policy.horizon()));
  for (int k = 0; k < policy.horizon(); ++k) {
    const Vector u = net.action_scale *
                     encode_action(policy.actions[size_t(k / policy.repeat)], int(net.action_dim));
    actions.erase(actions.begin());
    actions.push_back(u);
    Vector s_hat = predict_next(net, states, actions);
    states.erase(states.begin());
    states.push_back(s_hat);
    trace.states.push_back(std::move(s_hat));
  }
  return trace;
}

EFEScore score_series(const Eigen::Ref<const Vector>& distances) {
  if (distances.size() == 0) throw std::invalid_argument("score: empty trace");
  EFEScore s;
  s.goal_term = distances.sum();
  const double mean = s.goal_term / double(distances.size());
  s.variance = (distances.array() - mean).square().sum() / double(distances.size());
  return s;
}

EFEScore score(const RolloutTrace& trace, const Vector& s_star) {
  if (trace.states.empty()) throw std::invalid_argument("score: empty trace");
  Vector d(Index(trace.states.size()));
  for (size_t l = 0; l < trace.states.size(); ++l)
    d(Index(l)) = (trace.states[l] - s_star).squaredNorm();
  return score_series(d);
}

double adaptive_threshold(const std::vector<double>& variances, double beta) {
  if (variances.empty()) throw std::invalid_argument("adaptive_threshold: empty variance list");
  double lo = variances[0], hi = variances[0];
  for (double v : variances) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return beta * 0.5 * (hi + lo);
}

std::size_t select_policy(const std::vector<EFEScore>& scores, double t_v) {
  if (scores.empty()) throw std::invalid_argument("select_policy: empty score list");
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].variance < t_v) continue;
    if (best == scores.size() || scores[i].goal_term < scores[best].goal_term) best = i;
  }
  if (best == scores.size()) {
    best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i].goal_term < scores[best].goal_term) best = i;
  }
  return best;
}

namespace {

// Rolling window state for the batched rollout: one column per policy.
// Column-major storage makes the per-step shift a contiguous memmove.
void shift_up(Matrix& m, Index rows) {
  const Index tail = m.rows() - rows;
  for (Index j = 0; j < m.cols(); ++j)
    std::memmove(m.col(j).data(), m.col(j).data() + rows, size_t(tail) * sizeof(double));
}

} // namespace

Matrix rollout_distance_batch(const TransitionNet& net, const std::vector<Vector>& seed_states,
                              const std::vector<Vector>& seed_actions,
                              const std::vector<Policy>& policies, const Vector& s_star) {
  if (Index(seed_states.size()) != net.l_buf || Index(seed_actions.size()) != net.l_buf)
    throw std::invalid_argument("rollout_distance_batch: need l_buf seed states and actions");
  if (policies.empty()) throw std::invalid_argument("rollout_distance_batch: no policies");
  const int horizon = policies[0].horizon();
  const int repeat = policies[0].repeat;
  for (const auto& p : policies)
    if (p.horizon() != horizon || p.repeat != repeat)
      throw std::invalid_argument("rollout_distance_batch: policies of mixed horizon");

  const Index m = net.code_dim();
  const Index sd = net.state_dim;
  const Index ad = net.action_dim;
  const Index n_p = Index(policies.size());
  const Index state_rows = Index(net.l_buf) * sd;  // observed state slots
  const Index action_rows = Index(net.l_buf) * ad;

  // Observed rows of the dictionary: every state slot but the newest, plus
  // all action slots.
  const auto w_states = net.dict.weights.topRows(state_rows);
  const auto w_actions = net.dict.weights.bottomRows(action_rows);
  const auto w_next = net.dict.weights.middleRows(net.next_slot_offset(), sd);

  Matrix gram(m, m);
  gram.noalias() = w_states.transpose() * w_states;
  gram.noalias() += w_actions.transpose() * w_actions;

  double eta = net.cfg.eta_c;
  if (eta <= 0.0) {
    Matrix w_obs(state_rows + action_rows, m);
    w_obs.topRows(state_rows) = w_states;
    w_obs.bottomRows(action_rows) = w_actions;
    const double sigma_sq = spectral_norm_sq(w_obs);
    double factor = 0.5;
    if (const char* env = std::getenv("HAIF_ETA_FACTOR")) factor = 0.5 * std::atof(env);
    eta = sigma_sq > 0.0 ? factor / sigma_sq : 1.0;
  }
  const double theta = eta * net.cfg.lambda / 2.0;
  const Matrix step = Matrix::Identity(m, m) - eta * gram; // I - eta*G

  Matrix s_win(state_rows, n_p);
  Matrix a_win(action_rows, n_p);
  for (Index i = 0; i < net.l_buf; ++i) {
    for (Index j = 0; j < n_p; ++j) {
      s_win.block(i * sd, j, sd, 1) = seed_states[size_t(i)];
      a_win.block(i * ad, j, ad, 1) = seed_actions[size_t(i)];
    }
  }

  Matrix h(m, n_p), codes(m, n_p), iter(m, n_p), s_hat(sd, n_p);
  Matrix distances(horizon, n_p);
  std::vector<Vector> encodings;
  for (int a = 0; a < int(ad); ++a)
    encodings.push_back(net.action_scale * encode_action(a, int(ad)));

  for (int k = 0; k < horizon; ++k) {
    shift_up(a_win, ad);
    for (Index j = 0; j < n_p; ++j)
      a_win.block(action_rows - ad, j, ad, 1) =
          encodings[size_t(policies[size_t(j)].actions[size_t(k / repeat)])];

    h.noalias() = w_states.transpose() * s_win;
    h.noalias() += w_actions.transpose() * a_win;
    h *= eta;

    codes = (h.array() - theta).max(0.0) + (h.array() + theta).min(0.0);
    for (int it = 1; it < net.cfg.n_iters; ++it) {
      iter.noalias() = step * codes;
      iter += h;
      codes = (iter.array() - theta).max(0.0) + (iter.array() + theta).min(0.0);
    }

    s_hat.noalias() = w_next * codes;
    for (Index j = 0; j < n_p; ++j) {
      const double n = s_hat.col(j).norm();
      if (n > 0.0) s_hat.col(j) *= net.alpha / n;
      distances(k, j) = (s_hat.col(j) - s_star).squaredNorm();
    }

    shift_up(s_win, sd);
    s_win.bottomRows(sd) = s_hat;
  }
  return distances;
}

PolicyDecision evaluate_policies(const TransitionNet& net, const std::vector<Vector>& seed_states,
                                 const std::vector<Vector>& seed_actions,
                                 const std::vector<Policy>& policies, const Vector& s_star,
                                 double beta) {
  const Matrix d = rollout_distance_batch(net, seed_states, seed_actions, policies, s_star);
  PolicyDecision decision;
  decision.scores.reserve(policies.size());
  std::vector<double> variances;
  variances.reserve(policies.size());
  for (Index j = 0; j < d.cols(); ++j) {
    decision.scores.push_back(score_series(d.col(j)));
    variances.push_back(decision.scores.back().variance);
  }
  decision.threshold = adaptive_threshold(variances, beta);
  decision.selected = select_policy(decision.scores, decision.threshold);
  return decision;
}

} // namespace haif
