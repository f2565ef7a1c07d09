#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weyl/grid.hpp"
#include "weyl/potentials.hpp"

namespace weyl {

struct ValidationSettings {
  double tol_fourier = 1e-10;
  /// Kinetic Lieb-Thirring constant for d = 2; no default value is assumed.
  std::optional<double> lieb_thirring_2d;
  /// Required V(boundary) - E.
  double min_confinement_margin = 1.0;
};

/// Problem definition (d, hbar, V, w, E, lambda) on a grid.
class ModelSpec {
 public:
  ModelSpec(Grid grid, double hbar, PotentialSpec potential, InteractionSpec interaction,
            double chemical_potential, double coupling = 1.0, ValidationSettings validation = {});

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  double hbar() const noexcept { return hbar_; }
  const PotentialSpec& potential() const noexcept { return potential_; }
  const InteractionSpec& interaction() const noexcept { return interaction_; }
  double chemical_potential() const noexcept { return chemical_potential_; }
  double coupling() const noexcept { return coupling_; }
  const ValidationSettings& validation() const noexcept { return validation_; }

  /// hbar^d
  double hbar_d() const;
  /// V sampled on the grid, without the -E shift.
  Field potential_field() const;
  /// True when lambda * w vanishes, i.e. the model is non-interacting.
  bool non_interacting() const noexcept { return coupling_ == 0.0 || interaction_.is_zero(); }

  ModelSpec with_grid(Grid grid) const;
  ModelSpec with_hbar(double hbar) const;
  ModelSpec with_coupling(double lambda) const;
  ModelSpec with_chemical_potential(double e) const;
  ModelSpec with_interaction(InteractionSpec w) const;

 private:
  Grid grid_;
  double hbar_;
  PotentialSpec potential_;
  InteractionSpec interaction_;
  double chemical_potential_;
  double coupling_;
  ValidationSettings validation_;
};

struct ValidationReport {
  double evenness_defect = 0.0;  // max |w(x) - w(-x)| over sampled offsets
  bool even = true;

  RepulsivityMode mode = RepulsivityMode::fourier_nonneg;
  double fourier_min = 0.0;  // min of the discrete transform of sampled w
  bool fourier_nonneg = true;
  double negative_part_sup = 0.0;  // ||(w^)_-||_inf
  std::optional<double> smallness_threshold;
  bool smallness_ok = true;

  double confinement_margin = 0.0;  // min over boundary nodes of V - E
  bool confined = true;

  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
};

/// Checks evenness, repulsivity and confinement; never throws on a bad model.
ValidationReport validate_model(const ModelSpec& model);

/// Discrete Fourier transform (times spacing^d) of w sampled on node offsets, via an
/// odd circulant embedding at least (2n-1)^d long, padded while w has not decayed.
/// Nonnegativity implies the Toeplitz form sum_ij f_i f_j w(x_i - x_j) >= 0 on the grid.
Field sampled_kernel_transform(const Grid& grid, const InteractionSpec& w);

}  // namespace weyl
