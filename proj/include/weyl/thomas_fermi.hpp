#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "weyl/energies.hpp"
#include "weyl/grid.hpp"
#include "weyl/model.hpp"
#include "weyl/operator_matrix.hpp"

namespace weyl {

struct TfFixedPointConfig {
  double mixing = 0.5;  // beta, halved whenever the residual grows
  double tol = 1e-12;
  int max_iters = 100000;
};

struct TfMinimizeConfig {
  double step = 1.0;  // first trial step; later steps are Barzilai-Borwein
  double tol = 1e-10;
  int max_iters = 100000;
};

/// All L1 norms are grid integrals, sum |f_i| dx^d.
struct TfSolveReport {
  std::string method;
  int iterations = 0;
  double residual = 0.0;  // ||rho - Phi(rho)||_1
  double mass = 0.0;
  EnergyBreakdown energy;
  double kkt_residual = 0.0;
  double gradient_map_norm = 0.0;  // minimize only
  bool converged = false;
};

void to_json(nlohmann::json& j, const TfSolveReport& r);

struct TfResult {
  Density rho;
  TfSolveReport report;
};

/// Phi(rho) = |B| / (2 pi)^d * (E - V - lambda w * rho)_+^{d/2}
Density tf_map(const ModelSpec& model, const Density& rho);
Field tf_map(const ModelOperators& ops, const Field& rho);

TfResult tf_fixed_point(const ModelSpec& model, const TfFixedPointConfig& cfg = {});
TfResult tf_fixed_point(const ModelOperators& ops, const TfFixedPointConfig& cfg = {});

/// Spectral projected gradient on {rho >= 0} with nonmonotone Armijo backtracking.
TfResult tf_minimize(const ModelSpec& model, const TfMinimizeConfig& cfg = {});
TfResult tf_minimize(const ModelOperators& ops, const TfMinimizeConfig& cfg = {});

/// c_TF rho^{2/d} + V - E + lambda w * rho
Field tf_gradient(const ModelOperators& ops, const Field& rho);

/// Largest violation of the variational inequality: |grad| on {rho > 0}, (-grad)_+ on {rho = 0}.
double tf_kkt_residual(const ModelOperators& ops, const Field& rho);

/// Largest rho value at nodes with V >= E + lambda ||w * rho||_inf.
double tf_support_violation(const ModelOperators& ops, const Field& rho);

double l1_norm(const Grid& grid, const Field& f);

/// Columns x (y) rho, one node per line.
void write_density_text(std::ostream& out, const Density& rho);
nlohmann::json density_json(const Density& rho);

}  // namespace weyl
