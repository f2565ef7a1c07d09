#pragma once

#include <json.hpp>

#include "weyl/convolution.hpp"
#include "weyl/grid.hpp"
#include "weyl/model.hpp"
#include "weyl/operator_matrix.hpp"
#include "weyl/phase_grid.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

/// total = kinetic + potential + direct - exchange.
/// potential includes the -E * mass term; direct and exchange carry lambda
/// and every prefactor, so the fields add up as stated.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double direct = 0.0;
  double exchange = 0.0;
  double total = 0.0;

  void finalize() noexcept { total = kinetic + potential + direct - exchange; }
};

void to_json(nlohmann::json& j, const EnergyBreakdown& e);
void from_json(const nlohmann::json& j, EnergyBreakdown& e);

/// c_TF = 4 pi^2 / |B(0,1)|^{2/d}
struct TfConstants {
  int dim = 1;
  double ball_volume = 2.0;
  double c_tf = 0.0;

  static TfConstants for_dim(int dim);
};

/// D_w(a, b) = sum_ij a_i b_j w(x_i - x_j) dx^{2d}
double direct_term(const Density& a, const Density& b, const InteractionSpec& w);
double direct_term(const KernelTable& kernel, const Field& a, const Field& b);

/// Ex_w(gamma) = sum_ij Gamma_ij^2 w(x_i - x_j)
double exchange_term(const DensityMatrix& gamma, const InteractionSpec& w);
double exchange_term(const KernelTable& kernel, const Eigen::MatrixXd& gamma);

EnergyBreakdown hf_energy(const ModelOperators& ops, const DensityMatrix& gamma, bool include_exchange);
EnergyBreakdown hf_energy(const ModelSpec& model, const DensityMatrix& gamma, bool include_exchange);
/// Same functional on a factored projector U U^T; avoids a dense Gamma when the model is non-interacting.
EnergyBreakdown hf_energy(const ModelOperators& ops, const SpectralProjector& projector, bool include_exchange);

EnergyBreakdown tf_energy(const ModelSpec& model, const Density& rho);
EnergyBreakdown tf_energy(const ModelOperators& ops, const Field& rho);

/// rho_m(x) = (2 pi)^{-d} int m(x, xi) d xi
Field phase_space_density(const HusimiField& m);

/// (2 pi)^{-d} iint |xi|^2 m + int (V - E) rho_m + (lambda/2) D_w(rho_m, rho_m)
EnergyBreakdown vlasov_energy(const ModelSpec& model, const HusimiField& m);

struct CoercivityDiagnostic {
  double energy = 0.0;       // hf_energy total
  double lower_bound = 0.0;  // (hbar^d/4) tr((-hbar^2 Delta + V - E + 1) gamma) - C
  double constant = 0.0;     // C
  double margin = 0.0;       // energy - lower_bound
  bool holds = false;
};

/// C = -hbar^d * (sum of negative eigenvalues of (3/4)(-hbar^2 Delta + V - E) - 1/4).
/// Sufficient whenever D_w - Ex_w >= 0 on K, e.g. for pointwise nonnegative w.
double coercivity_constant(const ModelSpec& model);

CoercivityDiagnostic coercivity_check(const ModelOperators& ops, const DensityMatrix& gamma, double constant,
                                      bool include_exchange = true);
CoercivityDiagnostic coercivity_check(const ModelSpec& model, const DensityMatrix& gamma);

}  // namespace weyl
