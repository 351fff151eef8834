#pragma once

#include <vector>

#include "haif/types.hpp"

namespace haif {

/// Dense dictionary of one Hebbian ensemble: an input_dim x code_dim weight
/// matrix mapping sparse codes back to the input space.
struct Dictionary {
  Matrix weights; // N x M

  Dictionary() = default;
  explicit Dictionary(Matrix w);

  Index input_dim() const { return weights.rows(); }
  Index code_dim() const { return weights.cols(); }

  /// Fresh dictionary with entries drawn i.i.d. from N(0, stddev^2).
  static Dictionary random(Index input_dim, Index code_dim, double stddev, Rng& rng);
};

/// Parameters of the coding / learning dynamics of one ensemble.
struct CodingConfig {
  double lambda = 0.0; // sparsity scale, >= 0
  double eta_c = 0.0;  // coding rate; <= 0 selects auto_step_size
  int n_iters = 100;   // coding iterations per input
  double eta_d = 1e-4; // Hebbian learning rate

  void validate() const;
};

/// Elementwise sign(c_i) * max(0, |c_i| - theta).
Vector soft_threshold(const Vector& c, double theta);

/// sigma_max(m)^2 estimated by power iteration on m^T m (at most 50
/// iterations, relative tolerance 1e-6). Returns 0 for a zero matrix.
double spectral_norm_sq(const Matrix& m);

/// Coding step size 0.5 / sigma_max(dict)^2, with sigma_max estimated by
/// power iteration on W^T W (at most 50 iterations, relative tolerance 1e-6).
/// Half the proximal-gradient stability limit, so the coding objective
/// ||Wc - o||^2 + lambda*||c||_1 descends monotonically. Throws on a zero
/// matrix.
double auto_step_size(const Dictionary& dict);

/// Infer the sparse code of `input`: starting from c = 0, run cfg.n_iters
/// iterations of
///   c <- soft_threshold(c - eta_c * W^T (W c - input), eta_c * lambda / 2),
/// the proximal-gradient dynamics of min_c ||Wc - input||^2 + lambda*||c||_1.
/// The dictionary is read-only. If `objective_trace` is non-null it receives
/// the objective value before the first iteration and after each one.
Vector code(const Dictionary& dict, const Vector& input, const CodingConfig& cfg,
            std::vector<double>* objective_trace = nullptr);

/// Same as `code`, but the residual is accumulated only over rows where
/// `mask` is true; entries of `partial_input` at mask-false rows are ignored.
/// Equivalent to running `code` on the row-submatrix of the dictionary
/// selected by the mask. Throws if the mask is all-false.
Vector code_masked(const Dictionary& dict, const Vector& partial_input,
                   const std::vector<bool>& mask, const CodingConfig& cfg);

/// Re-projection W * c of a code into the input space.
Vector reconstruct(const Dictionary& dict, const Vector& c);

/// One local Hebbian update: W <- W - eta_d * (W c - input) * c^T, the rank-1
/// gradient step on 1/2 ||W c - input||^2.
void hebbian_step(Dictionary& dict, const Vector& c, const Vector& input, double eta_d);

/// The coupled neural/weight dynamics run as one system: every coding
/// iteration is followed by a Hebbian weight update with the current
/// iterate, for cfg.n_iters iterations. The coding step size is fixed at
/// entry. Returns the final code; the dictionary is updated in place.
Vector code_adapt(Dictionary& dict, const Vector& input, const CodingConfig& cfg);

} // namespace haif
