#pragma once

#include <Eigen/Dense>

#include <random>

namespace haif {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

} // namespace haif
