#pragma once

#include <json.hpp>

#include "weyl/energies.hpp"
#include "weyl/grid.hpp"
#include "weyl/model.hpp"
#include "weyl/operator_matrix.hpp"
#include "weyl/phase_grid.hpp"

namespace weyl {

/// Coherent states f^hbar_{x,xi}(y) = hbar^{-d/4} f((x - y)/sqrt(hbar)) e^{-i xi.y/hbar}
/// built on the standard Gaussian window f(y) = pi^{-d/4} e^{-|y|^2/2}.
struct CoherentFamily {
  int dim = 1;
  double hbar = 1.0;
  /// ||grad f||^2 = d/2
  double gradient_norm2 = 0.5;

  static CoherentFamily gaussian(int dim, double hbar);

  /// f(y)
  double window(const Point& y) const;
  /// |f^hbar(z)|^2 = hbar^{-d/2} f(z/sqrt(hbar))^2
  double envelope(const Point& z) const;
  /// Window samples are dropped beyond this distance (8 sqrt(hbar)).
  double cutoff() const;
  /// sum_j |f^hbar(x - y_j)|^2 dx^d at the grid centre.
  double quadrature_norm(const Grid& grid) const;
};

/// Xi = margin * sqrt(max(E - min V, 1)); momentum spacing about spacing_factor * sqrt(hbar).
PhaseGrid default_phase_grid(const ModelSpec& model, double margin = 2.0, double spacing_factor = 0.25);

/// m(x_i, xi_k) = <f^hbar_{x_i, xi_k}, gamma f^hbar_{x_i, xi_k}> under grid quadrature.
HusimiField husimi_transform(const DensityMatrix& gamma, const CoherentFamily& family, const PhaseGrid& phase);

/// rho_m(x) = (2 pi)^{-d} int m(x, xi) d xi
Density husimi_density(const HusimiField& m);

/// hbar^d (rho_gamma * |f^hbar|^2)
Field smeared_density(const DensityMatrix& gamma, const CoherentFamily& family);

struct HusimiIdentityReport {
  /// ||rho_m - hbar^d rho_gamma * |f^hbar|^2||_1 / ||hbar^d rho_gamma * |f^hbar|^2||_1
  double density_residual = 0.0;
  /// |(2 pi)^{-d} iint |xi|^2 m - hbar^d tr(-hbar^2 Delta gamma) - hbar^{d+1} tr(gamma) ||grad f||^2|, relative
  double kinetic_residual = 0.0;
  /// |(2 pi)^{-d} iint V m - hbar^d int rho_gamma (V * |f^hbar|^2)|, relative to the kinetic magnitude
  double potential_residual = 0.0;
  double kinetic_magnitude = 0.0;
  /// |(2 pi hbar)^{-d} iint m - tr gamma| / tr gamma
  double trace_residual = 0.0;
  double min_occupation = 0.0;
  double max_occupation = 0.0;
};

void to_json(nlohmann::json& j, const HusimiIdentityReport& r);

HusimiIdentityReport kinetic_identity_check(const DensityMatrix& gamma, const CoherentFamily& family,
                                            const PhaseGrid& phase, const ModelSpec& model);
/// Same checks on an already computed transform of gamma.
HusimiIdentityReport kinetic_identity_check(const DensityMatrix& gamma, const HusimiField& m,
                                            const CoherentFamily& family, const ModelSpec& model);

/// m(x, xi) = 1{|xi|^2 <= c_TF rho(x)^{2/d}}, averaged over each momentum cell so that
/// rho_m reproduces rho. Throws ConfigError when the Fermi ball leaves the momentum box.
HusimiField bathtub_lift(const Density& rho, const TfConstants& constants, const PhaseGrid& phase);

/// Randomized competitors to a bathtub lift: per spatial node, momentum cells are
/// shuffled, transposed or cyclically shifted. Each competitor keeps rho_m and 0 <= m <= 1,
/// so the bathtub principle says none has lower Vlasov energy.
struct RearrangementReport {
  int trials = 0;
  double bathtub_energy = 0.0;
  double min_energy = 0.0;
  /// min over trials of (e_trial - e_bathtub) / |e_bathtub|; negative means a competitor won.
  double min_relative_excess = 0.0;
  double max_density_defect = 0.0;
};

void to_json(nlohmann::json& j, const RearrangementReport& r);

RearrangementReport rearrangement_check(const ModelSpec& model, const HusimiField& lift, std::uint64_t seed,
                                        int trials);

}  // namespace weyl
