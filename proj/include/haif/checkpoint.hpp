#pragma once

#include <iosfwd>
#include <string>

#include "haif/harness.hpp"

namespace haif {

/// Row-major text serialization with a dims header, full double precision.
void save_matrix(std::ostream& out, const Matrix& m);
Matrix load_matrix(std::istream& in);

void save_dictionary(const std::string& path, const Dictionary& dict);
Dictionary load_dictionary(const std::string& path);

struct Checkpoint {
  ExperimentConfig config;
  ObsNormalizer normalizer;
  double eta_d = 0.0;
  Dictionary posterior;
  Dictionary transition;
};

/// Versioned text container holding both dictionaries, the normalizer, the
/// current learning rate and the full config.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint make_checkpoint(const ExperimentConfig& cfg, const HebbianAifAgent& agent,
                           const ObsNormalizer& norm);

} // namespace haif
