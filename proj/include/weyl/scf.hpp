#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weyl/energies.hpp"
#include "weyl/model.hpp"
#include "weyl/operator_matrix.hpp"

namespace weyl {

enum class LineSearch { fixed, optimal_damping };
enum class InitialState { zero, aufbau, supplied };

struct ScfConfig {
  int max_iters = 500;
  double mixing = 0.3;  // fixed line search only
  LineSearch line_search = LineSearch::optimal_damping;
  double tol_energy = 1e-11;
  double tol_state = 1e-8;
  /// Fermi-shell width; 1e-9 ||H||_F per iteration when unset.
  std::optional<double> zero_tol;
  bool include_exchange = true;
  InitialState initial_state = InitialState::aufbau;
  std::optional<Eigen::MatrixXd> supplied_state;
  /// Also search the occupation of the eigenvector closest to the Fermi level
  /// (optimal damping only). Needed when the minimizer has a partially filled shell.
  bool fermi_shell_search = true;
  /// Divergence guard: stop when the energy drops below this value.
  std::optional<double> energy_floor;
  /// Diagonalize every iterate and assert 0 <= Gamma <= 1 (costly).
  bool check_admissibility = false;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct ScfReport {
  int iterations = 0;
  std::vector<double> energies;       // one entry per iterate, starting with the initial state
  std::vector<double> state_changes;  // ||Gamma_{k+1} - Gamma_k||_F
  std::vector<double> steps;          // damping t_k
  EnergyBreakdown final_energy;
  /// ||Gamma - 1{H_Gamma < 0}||_F of the returned state.
  double residual = 0.0;
  /// Same residual with the Fermi-shell block removed.
  double off_shell_residual = 0.0;
  /// Eigenvalues of H_Gamma within zero_tol of 0.
  Eigen::Index degeneracy = 0;
  double fermi_gap = 0.0;
  double zero_tol = 0.0;
  /// hbar^d tr Gamma
  double scaled_trace = 0.0;
  bool converged = false;
  bool diverged = false;
  std::string message;

  /// iter,energy,state_change,step
  void write_trajectory_csv(std::ostream& out) const;
};

void to_json(nlohmann::json& j, const ScfReport& r);

struct ScfResult {
  DensityMatrix gamma;
  ScfReport report;
};

ScfResult scf_solve(const ModelSpec& model, const ScfConfig& cfg);
ScfResult scf_solve(const ModelOperators& ops, const ScfConfig& cfg);

/// Energy along Gamma + t delta: q(t) = energy + slope t + curvature t^2 / 2. Exact for
/// the HF functional.
struct StepQuadratic {
  double energy = 0.0;
  double slope = 0.0;
  double curvature = 0.0;

  double at(double t) const noexcept { return energy + slope * t + 0.5 * curvature * t * t; }
  /// Minimizer of q on [0, 1]; 1 when the curvature is not positive and the slope is negative.
  double best_step() const noexcept;
};

/// Q(X, Y) = D_w(rho_X, rho_Y) - [exchange] sum_ij X_ij Y_ij w(x_i - x_j)
double interaction_form(const ModelOperators& ops, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                        bool include_exchange);

StepQuadratic step_quadratic(const ModelOperators& ops, const DensityMatrix& gamma, const Eigen::MatrixXd& target,
                             bool include_exchange);
/// Optimal damping toward the candidate projector Pi.
double optimal_step(const ModelSpec& model, const DensityMatrix& gamma, const DensityMatrix& pi,
                    bool include_exchange);

struct MinimizerCertificate {
  double projector_residual = 0.0;  // ||Gamma^2 - Gamma||_F
  double el_residual = 0.0;         // ||Gamma - 1{H < 0}||_F off the Fermi shell
  double full_residual = 0.0;       // ||Gamma - 1{H < 0}||_F
  double fermi_gap = 0.0;           // min |lambda_k(H_Gamma)|
  Eigen::Index shell_dimension = 0;
  double zero_tol = 0.0;
};

void to_json(nlohmann::json& j, const MinimizerCertificate& c);

MinimizerCertificate minimizer_certificate(const ModelOperators& ops, const DensityMatrix& gamma,
                                           bool include_exchange, std::optional<double> zero_tol = std::nullopt);
MinimizerCertificate minimizer_certificate(const ModelSpec& model, const DensityMatrix& gamma, bool include_exchange);

/// hbar^d tr((-hbar^2 Delta + V + 1) Gamma), with the bare potential.
double trace_bound_value(const ModelOperators& ops, const DensityMatrix& gamma);

}  // namespace weyl
