#include "haif/sparse_coding.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace haif {

Dictionary::Dictionary(Matrix w) : weights(std::move(w)) {
  if (weights.size() == 0)
    throw std::invalid_argument("Dictionary: empty weight matrix");
  if (!weights.allFinite())
    throw std::invalid_argument("Dictionary: non-finite weights");
}

Dictionary Dictionary::random(Index input_dim, Index code_dim, double stddev, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, stddev);
  Matrix w(input_dim, code_dim);
  // Row-major fill order so serialized layout and draw order coincide.
  for (Index i = 0; i < input_dim; ++i)
    for (Index j = 0; j < code_dim; ++j)
      w(i, j) = gauss(rng);
  return Dictionary(std::move(w));
}

void CodingConfig::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("CodingConfig: lambda < 0");
  if (n_iters < 1) throw std::invalid_argument("CodingConfig: n_iters < 1");
  // eta_d == 0 is allowed: it freezes the weights.
  if (eta_d < 0.0) throw std::invalid_argument("CodingConfig: eta_d < 0");
}

Vector soft_threshold(const Vector& c, double theta) {
  if (theta < 0.0) throw std::invalid_argument("soft_threshold: theta < 0");
  // Branchless form of sign(x) * max(0, |x| - theta).
  return (c.array() - theta).max(0.0) + (c.array() + theta).min(0.0);
}

double spectral_norm_sq(const Matrix& w) {
  const Index m = w.cols();
  // Deterministic start; fall back to basis vectors if it lies in the
  // null space of a nonzero matrix.
  Vector v = Vector::Constant(m, 1.0 / std::sqrt(double(m)));
  for (Index k = 0; (w * v).squaredNorm() == 0.0; ++k) {
    if (k == m) return 0.0; // zero matrix
    v = Vector::Unit(m, k);
  }
  double sigma_sq = 0.0;
  for (int it = 0; it < 50; ++it) {
    Vector z = w.transpose() * (w * v);
    const double zn = z.norm();
    if (zn == 0.0) break;
    const double estimate = v.dot(z);
    v = z / zn;
    if (it > 0 && std::abs(estimate - sigma_sq) <= 1e-6 * std::abs(estimate)) {
      sigma_sq = estimate;
      break;
    }
    sigma_sq = estimate;
  }
  return sigma_sq;
}

namespace {

// ISTA loop shared by code / code_masked, operating on an already
// row-selected dictionary.
Vector ista(const Matrix& w, const Vector& input, const CodingConfig& cfg,
            std::vector<double>* trace) {
  double eta = cfg.eta_c;
  if (eta <= 0.0) {
    const double sigma_sq = spectral_norm_sq(w);
    double factor = 0.5;
    if (const char* env = std::getenv("HAIF_ETA_FACTOR")) factor = 0.5 * std::atof(env);
    // A zero dictionary has zero gradient everywhere; the iterate never
    // leaves the origin, so any step size gives the same result.
    eta = sigma_sq > 0.0 ? factor / sigma_sq : 1.0;
  }
  const double theta = eta * cfg.lambda / 2.0;

  Vector c = Vector::Zero(w.cols());
  auto objective = [&](const Vector& x) {
    return (w * x - input).squaredNorm() + cfg.lambda * x.lpNorm<1>();
  };
  if (trace) {
    trace->clear();
    trace->push_back(objective(c));
  }
  Vector grad(w.cols());
  for (int it = 0; it < cfg.n_iters; ++it) {
    grad.noalias() = w.transpose() * (w * c - input);
    c = soft_threshold(c - eta * grad, theta);
    if (trace) trace->push_back(objective(c));
  }
  return c;
}

} // namespace

double auto_step_size(const Dictionary& dict) {
  const double sigma_sq = spectral_norm_sq(dict.weights);
  if (sigma_sq <= 0.0)
    throw std::domain_error("auto_step_size: zero dictionary has no spectral norm");
  return 0.5 / sigma_sq;
}

Vector code(const Dictionary& dict, const Vector& input, const CodingConfig& cfg,
            std::vector<double>* objective_trace) {
  cfg.validate();
  if (input.size() != dict.input_dim())
    throw std::invalid_argument("code: input length does not match dictionary input_dim");
  if (!input.allFinite())
    throw std::invalid_argument("code: non-finite input");
  return ista(dict.weights, input, cfg, objective_trace);
}

Vector code_masked(const Dictionary& dict, const Vector& partial_input,
                   const std::vector<bool>& mask, const CodingConfig& cfg) {
  cfg.validate();
  if (Index(mask.size()) != dict.input_dim())
    throw std::invalid_argument("code_masked: mask length does not match dictionary input_dim");
  if (partial_input.size() != dict.input_dim())
    throw std::invalid_argument("code_masked: partial_input length does not match input_dim");

  Index n_obs = 0;
  for (bool b : mask) n_obs += b;
  if (n_obs == 0)
    throw std::invalid_argument("code_masked: all-false mask leaves nothing to code");

  Matrix w_obs(n_obs, dict.code_dim());
  Vector o_obs(n_obs);
  Index r = 0;
  for (Index i = 0; i < dict.input_dim(); ++i) {
    if (!mask[size_t(i)]) continue;
    const double v = partial_input(i);
    if (!std::isfinite(v))
      throw std::invalid_argument("code_masked: non-finite input at observed row");
    w_obs.row(r) = dict.weights.row(i);
    o_obs(r) = v;
    ++r;
  }
  return ista(w_obs, o_obs, cfg, nullptr);
}

Vector reconstruct(const Dictionary& dict, const Vector& c) {
  if (c.size() != dict.code_dim())
    throw std::invalid_argument("reconstruct: code length does not match dictionary code_dim");
  return dict.weights * c;
}

Vector code_adapt(Dictionary& dict, const Vector& input, const CodingConfig& cfg) {
  cfg.validate();
  if (input.size() != dict.input_dim())
    throw std::invalid_argument("code_adapt: input length does not match dictionary input_dim");
  if (!input.allFinite())
    throw std::invalid_argument("code_adapt: non-finite input");

  double eta = cfg.eta_c;
  if (eta <= 0.0) {
    const double sigma_sq = spectral_norm_sq(dict.weights);
    eta = sigma_sq > 0.0 ? 0.5 / sigma_sq : 1.0;
  }
  const double theta = eta * cfg.lambda / 2.0;

  Vector c = Vector::Zero(dict.code_dim());
  Vector residual(dict.input_dim());
  for (int it = 0; it < cfg.n_iters; ++it) {
    residual.noalias() = dict.weights * c;
    residual -= input;
    c = soft_threshold(c - eta * (dict.weights.transpose() * residual), theta);
    hebbian_step(dict, c, input, cfg.eta_d);
  }
  return c;
}

void hebbian_step(Dictionary& dict, const Vector& c, const Vector& input, double eta_d) {
  if (c.size() != dict.code_dim())
    throw std::invalid_argument("hebbian_step: code length does not match code_dim");
  if (input.size() != dict.input_dim())
    throw std::invalid_argument("hebbian_step: input length does not match input_dim");
  const Vector scaled = eta_d * (dict.weights * c - input);
  dict.weights.noalias() -= scaled * c.transpose();
}

} // namespace haif
