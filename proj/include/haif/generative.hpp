#pragma once

#include <vector>

#include "haif/sparse_coding.hpp"
#include "haif/types.hpp"

namespace haif {

/// One-hot encoding of a discrete action id, unit magnitude.
Vector encode_action(int action, int n_actions = 2);
Vector zero_action(int n_actions = 2);

/// Renormalize a latent state onto the alpha-sphere; the zero vector is kept
/// as-is (a valid degenerate state, reachable at high sparsity).
Vector normalize_state(const Vector& s, double alpha);

/// Posterior ensemble q(s | o, a): codes an observation-action pair and emits
/// the latent state, homeostatically constrained to the alpha-sphere.
struct PosteriorNet {
  Dictionary dict; // (obs_dim + action_dim) x M_Q
  CodingConfig cfg;
  Index obs_dim = 0;
  Index action_dim = 0;
  double alpha = 5.0;

  Index code_dim() const { return dict.code_dim(); }

  static PosteriorNet create(Index obs_dim, Index action_dim, Index code_dim,
                             const CodingConfig& cfg, double alpha, double init_stddev,
                             Rng& rng);
};

/// Auto-regressive transition ensemble: codes a lag window of latent states
/// and actions, and predicts the newest state slot by re-projection.
struct TransitionNet {
  Dictionary dict; // window_dim x M_P
  CodingConfig cfg;
  int l_buf = 1;
  Index state_dim = 0;
  Index action_dim = 0;
  double alpha = 5.0;
  double action_scale = 1.0; // magnitude of encoded actions in lag windows

  Index window_dim() const { return (l_buf + 1) * state_dim + Index(l_buf) * action_dim; }
  Index code_dim() const { return dict.code_dim(); }
  /// Rows of the flattened window holding the newest (predicted) state.
  Index next_slot_offset() const { return Index(l_buf) * state_dim; }

  static TransitionNet create(int l_buf, Index state_dim, Index action_dim, Index code_dim,
                              const CodingConfig& cfg, double alpha, double init_stddev,
                              Rng& rng);
};

/// Ordered history fed to the transition net: l_buf+1 states followed by
/// l_buf actions, both oldest first. The newest state occupies the final
/// state slot of the flattened vector.
struct LagWindow {
  std::vector<Vector> states;  // s_{l-L} ... s_l
  std::vector<Vector> actions; // a_{l-L} ... a_{l-1}
};

Vector flatten(const LagWindow& window);
void validate_window(const TransitionNet& net, const LagWindow& window);

/// Goal observation split: entries that define the goal, and free entries
/// swept over a grid when estimating the goal state.
struct GoalSpec {
  Vector goal_obs;               // full observation length; free entries ignored
  std::vector<Index> free_dims;  // indices swept by `grid`
  std::vector<double> grid;      // values assigned to every free dim in turn
};

/// Latent state for the current observation and the previously executed
/// action. Read-only on the dictionary.
Vector infer_posterior(const PosteriorNet& net, const Vector& obs, const Vector& action_enc);

/// Code the full window, apply one Hebbian step on the transition weights
/// against the flattened window, and return the code (consumed by the
/// top-down path).
Vector learn_transition(TransitionNet& net, const LagWindow& window);

/// Predict the next latent state from l_buf past states and actions: code the
/// window with the next-state slot masked out, re-project, read the slot, and
/// renormalize onto the alpha-sphere.
Vector predict_next(const TransitionNet& net, const std::vector<Vector>& lag_states,
                    const std::vector<Vector>& lag_actions);

/// Re-projected transition activity steering the posterior: next-state slot
/// of W_S * c_S, renormalized onto the alpha-sphere.
Vector topdown_target(const TransitionNet& net, const Vector& c_s);

/// Combined posterior update: with t = {obs, action},
///   W_P <- W_P - eta_d * (W_P s - t) s^T - eta_d * (W_P v - t) v^T,
/// the standard sparse-coding term plus the top-down term evaluated at the
/// same weights.
void learn_posterior(PosteriorNet& net, const Vector& obs, const Vector& action_enc,
                     const Vector& s, const Vector& v);

/// Goal state: average posterior over the goal observation with the free
/// dims swept across the grid and all actions, renormalized to the sphere.
Vector estimate_goal_state(const PosteriorNet& net, const GoalSpec& goal,
                           const std::vector<Vector>& action_encodings);

} // namespace haif
