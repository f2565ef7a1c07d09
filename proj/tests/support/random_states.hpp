#pragma once

#include <random>

#include <Eigen/Core>

#include "weyl/model.hpp"
#include "weyl/operator_matrix.hpp"

namespace weyl::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
Eigen::MatrixXd random_orthogonal(Eigen::Index n, Rng& rng);

/// Q diag(occ) Q^T with occupations drawn in [0, 1]; about a third of them are
/// pinned to 0 or 1 so that projector-like states are covered too.
Eigen::MatrixXd random_admissible(Eigen::Index n, Rng& rng);

/// Small interacting model: 1D with 9..25 nodes, or 2D with 5..7 nodes per axis
/// (one case in five), harmonic V, gaussian or exponential w with a > 0.
ModelSpec random_small_model(Rng& rng);

}  // namespace weyl::testing
