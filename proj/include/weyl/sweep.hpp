#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "weyl/config.hpp"
#include "weyl/energies.hpp"
#include "weyl/heat.hpp"
#include "weyl/phase_space.hpp"

namespace weyl {

enum class SolverKind { hf, rhf, tf, vlasov, heat, manybody };

SolverKind parse_solver(const std::string& name);
std::string solver_name(SolverKind kind);

struct GridGuardSettings {
  bool enabled = true;
  /// Allowed |e(n) - e(2n - 1)| at the smallest hbar; 10 * scf.tol_energy when unset.
  std::optional<double> tolerance;
};

struct SweepPlan {
  RunConfig config;
  std::vector<double> hbars;  // strictly decreasing
  std::set<SolverKind> solvers;
  std::vector<Point> probes;
  GridGuardSettings guard;
  std::filesystem::path output;

  bool runs(SolverKind kind) const { return solvers.count(kind) > 0; }
  /// Throws ConfigError unless the hbar list is strictly decreasing and positive.
  void validate() const;
};

/// model / model_file, hbar, solvers, probes, resolution, scf, thomas_fermi, heat,
/// manybody, phase_space, grid_guard, output.
SweepPlan parse_sweep_plan(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SweepPlan load_sweep_plan(const std::filesystem::path& path);

/// Cross-validated Thomas-Fermi reference, shared by every record.
struct TfTargets {
  std::size_t points = 0;
  double energy = 0.0;  // fixed-point energy
  double energy_minimize = 0.0;
  double mass = 0.0;
  double density_gap = 0.0;  // ||rho_fp - rho_pg||_1
  double energy_gap = 0.0;   // |e_fp - e_pg|
  bool converged = false;
  std::vector<double> probe_density;
  std::optional<Density> rho;
};

struct StateSummary {
  EnergyBreakdown energy;
  double scaled_trace = 0.0;  // hbar^d tr Gamma
  double residual = 0.0;
  double off_shell_residual = 0.0;
  double projector_residual = 0.0;  // ||Gamma^2 - Gamma||_F
  Eigen::Index degeneracy = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> probe_density;  // hbar^d rho_gamma at probes
};

struct SweepRecord {
  double hbar = 0.0;
  std::size_t points = 0;
  std::optional<StateSummary> rhf;
  std::optional<StateSummary> hf;
  /// hbar^{2d} Ex_w(gamma_HF) and its ratio to |e^HF|.
  std::optional<double> exchange_scaled;
  std::optional<double> exchange_ratio;
  /// hbar^d tr((-hbar^2 Delta + V + 1) gamma) for the rHF state (HF when rHF is off).
  std::optional<double> trace_bound;
  std::optional<HusimiIdentityReport> husimi;
  std::optional<double> manybody_energy;
  std::optional<double> manybody_hf_energy;
  std::vector<std::string> notes;
  Field rho_scaled;  // hbar^d rho of the reported state; not serialized
};

struct PointwiseRow {
  double hbar = 0.0;
  Point x{0.0, 0.0};
  double value = 0.0;   // hbar^d rho_gamma(x)
  double target = 0.0;  // rho_TF(x)
  double diff = 0.0;
};

/// Rows (hbar, x, hbar^d rho_gamma(x), rho_TF(x), |diff|) by linear interpolation.
std::vector<PointwiseRow> weyl_pointwise_table(const std::vector<std::pair<double, Density>>& scaled_densities,
                                               const std::vector<Point>& probes, const Density& rho_tf);

struct GridGuardResult {
  double hbar = 0.0;
  std::size_t points = 0;
  std::size_t refined_points = 0;
  double energy = 0.0;
  double refined_energy = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SweepSummary {
  std::vector<SweepRecord> records;  // sorted by decreasing hbar
  std::optional<TfTargets> tf;
  std::vector<PointwiseRow> pointwise;
  /// Log-log slopes of |e - e^TF| against hbar.
  std::optional<double> slope_rhf;
  std::optional<double> slope_hf;
  std::optional<double> trace_bound_constant;  // value at the largest hbar
  std::vector<double> trace_bound_violations;  // hbar values exceeding twice the constant
  std::optional<GridGuardResult> guard;
  std::optional<HeatReport> heat;
  std::optional<double> bathtub_vlasov_energy;
};

SweepSummary run_sweep(const SweepPlan& plan, int threads = 1, std::ostream* log = nullptr);

/// Least-squares slope of log|y| against log x over finite positive entries.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace weyl
