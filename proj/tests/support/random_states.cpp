#include "random_states.hpp"

#include <Eigen/QR>

namespace weyl::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Eigen::MatrixXd random_orthogonal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_admissible(Eigen::Index n, Rng& rng) {
  const Eigen::MatrixXd q = random_orthogonal(n, rng);
  Eigen::VectorXd occ(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = uniform(rng, 0.0, 1.0);
    occ[k] = u < 1.0 / 6.0 ? 0.0 : u < 1.0 / 3.0 ? 1.0 : uniform(rng, 0.0, 1.0);
  }
  Eigen::MatrixXd g = q * occ.asDiagonal() * q.transpose();
  return 0.5 * (g + g.transpose());
}

ModelSpec random_small_model(Rng& rng) {
  const bool two_d = std::uniform_int_distribution<int>(0, 4)(rng) == 0;
  const int dim = two_d ? 2 : 1;
  const std::size_t n = two_d ? 5 + 2 * std::uniform_int_distribution<std::size_t>(0, 1)(rng)
                              : 9 + 2 * std::uniform_int_distribution<std::size_t>(0, 8)(rng);
  const Grid grid(dim, uniform(rng, 1.5, 3.0), n);
  const double a = uniform(rng, 0.1, 2.0);
  const double sigma = uniform(rng, 0.3, 1.5);
  const InteractionSpec w = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? InteractionSpec::gaussian(a, sigma)
                                                                                : InteractionSpec::exponential(a, sigma);
  return ModelSpec(grid, uniform(rng, 0.1, 1.0), PotentialSpec::harmonic(uniform(rng, 0.5, 2.0)), w,
                   uniform(rng, 0.5, 2.0), uniform(rng, 0.2, 2.0));
}

}  // namespace weyl::testing
