#include "haif/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace haif {

namespace {
constexpr const char* kMagic = "haif-checkpoint v1";

void expect_tag(std::istream& in, const std::string& tag) {
  std::string got;
  in >> got;
  if (got != tag)
    throw std::runtime_error("checkpoint: expected '" + tag + "', found '" + got + "'");
}
} // namespace

void save_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << m(i, j) << (j + 1 < m.cols() ? ' ' : '\n');
  }
}

Matrix load_matrix(std::istream& in) {
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("checkpoint: bad matrix header");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw std::runtime_error("checkpoint: truncated matrix payload");
  return m;
}

void save_dictionary(const std::string& path, const Dictionary& dict) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  save_matrix(out, dict.weights);
}

Dictionary load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Dictionary(load_matrix(in));
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << kMagic << '\n';
  out << "[config]\n" << serialize_config(ckpt.config) << "[end]\n";
  out.precision(17);
  out << "[normalizer] " << ckpt.normalizer.mu_x << ' ' << ckpt.normalizer.sigma_x << ' '
      << ckpt.normalizer.mu_v << ' ' << ckpt.normalizer.sigma_v << '\n';
  out << "[eta_d] " << ckpt.eta_d << '\n';
  out << "[posterior]\n";
  save_matrix(out, ckpt.posterior.weights);
  out << "[transition]\n";
  save_matrix(out, ckpt.transition.weights);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != kMagic) throw std::runtime_error("checkpoint: unrecognized header '" + line + "'");

  Checkpoint ckpt;
  expect_tag(in, "[config]");
  std::getline(in, line); // rest of tag line
  while (std::getline(in, line)) {
    if (line == "[end]") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    ckpt.config.set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  expect_tag(in, "[normalizer]");
  in >> ckpt.normalizer.mu_x >> ckpt.normalizer.sigma_x >> ckpt.normalizer.mu_v >>
      ckpt.normalizer.sigma_v;
  expect_tag(in, "[eta_d]");
  in >> ckpt.eta_d;
  expect_tag(in, "[posterior]");
  ckpt.posterior = Dictionary(load_matrix(in));
  expect_tag(in, "[transition]");
  ckpt.transition = Dictionary(load_matrix(in));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return ckpt;
}

Checkpoint make_checkpoint(const ExperimentConfig& cfg, const HebbianAifAgent& agent,
                           const ObsNormalizer& norm) {
  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.normalizer = norm;
  ckpt.eta_d = agent.eta_d();
  ckpt.posterior = agent.posterior().dict;
  ckpt.transition = agent.transition().dict;
  return ckpt;
}

} // namespace haif
