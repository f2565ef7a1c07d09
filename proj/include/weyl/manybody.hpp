#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "weyl/model.hpp"

namespace weyl {

/// Galerkin truncation of the many-body problem to the M lowest eigenmodes
/// of -hbar^2 Delta + V.
///
/// h_ab = delta_ab (lambda_a - E);
/// W_abcd = iint phi_a(x) phi_b(y) w(x - y) phi_c(x) phi_d(y) dx dy.
class ModeBasis {
 public:
  static constexpr int max_modes = 14;

  ModeBasis(int modes, double hbar_d, Eigen::MatrixXd h, std::vector<double> w);

  int modes() const noexcept { return modes_; }
  double hbar_d() const noexcept { return hbar_d_; }
  const Eigen::MatrixXd& one_body() const noexcept { return h_; }
  double two_body(int a, int b, int c, int d) const;
  /// max |W_abcd - W_badc|, |W_abcd - W_cdab| over all indices.
  double symmetry_defect() const;

 private:
  int modes_;
  double hbar_d_;
  Eigen::MatrixXd h_;
  std::vector<double> w_;
};

/// Throws ConfigError when M > 14.
ModeBasis project_modes(const ModelSpec& model, int modes);

/// Dimension guard for sector_ground.
inline constexpr std::uint64_t max_sector_dimension = 4000;
std::uint64_t binomial(int n, int k);

/// Lowest eigenvalue of sum h_ab a+_a a_b + (hbar^d/2) sum W_abcd a+_a a+_b a_d a_c on N particles
/// (unscaled: no hbar^d prefactor on the result).
double sector_ground(const ModeBasis& basis, int particles);

struct SectorSpectrum {
  std::vector<double> sector_energies;  // index N
  int argmin = 0;
  double ground_energy = 0.0;  // hbar^d min_N
  bool interior = false;       // argmin < N_max
};

void to_json(nlohmann::json& j, const SectorSpectrum& s);

SectorSpectrum grand_canonical_ground(const ModeBasis& basis, int max_particles);

struct ModeHartreeFock {
  Eigen::MatrixXd density;  // orbital projector in the mode basis
  double energy = 0.0;      // hbar^d times the Slater-determinant energy
  int particles = 0;
  int iterations = 0;
  bool converged = false;
};

/// Hartree-Fock in the same truncation: damped Roothaan iteration on
/// F = h + hbar^d (J - K), finished on an aufbau Slater determinant.
ModeHartreeFock mode_hartree_fock(const ModeBasis& basis, int max_iters = 500, double tol = 1e-12);

/// Slater-determinant energy for an orbital projector (unscaled).
double slater_energy(const ModeBasis& basis, const Eigen::MatrixXd& gamma);

}  // namespace weyl
