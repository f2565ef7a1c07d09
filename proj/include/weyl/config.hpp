#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "weyl/model.hpp"
#include "weyl/scf.hpp"
#include "weyl/thomas_fermi.hpp"

namespace weyl {

/// Grid spacing per hbar: dx = min(sqrt(hbar) / sqrt_hbar_cells, hbar / (fermi_cells * p_F)),
/// p_F = sqrt(max(E - min V, 1)). The second bound resolves the Fermi-momentum oscillations.
struct ResolutionRule {
  double sqrt_hbar_cells = 4.0;
  double fermi_cells = 8.0;
  /// Fixed point count; bypasses the rule.
  std::optional<std::size_t> points;

  double spacing(double hbar, double fermi_momentum) const;
  /// Odd point count on [-L, L] for the given spacing bound.
  std::size_t points_for(double half_width, double hbar, double fermi_momentum) const;
};

double fermi_momentum(const PotentialSpec& v, const Grid& grid, double chemical_potential);

/// Model template: everything except the grid resolution and hbar.
struct ModelTemplate {
  int dim = 1;
  double half_width = 2.5;
  std::optional<std::size_t> points;
  double hbar = 0.1;
  double chemical_potential = 1.0;
  double coupling = 1.0;
  PotentialSpec potential;
  InteractionSpec interaction;
  ValidationSettings validation;

  /// Model at this hbar with n from the rule (or the fixed point count).
  ModelSpec instantiate(double hbar, const ResolutionRule& rule) const;
  ModelSpec instantiate(const ResolutionRule& rule) const { return instantiate(hbar, rule); }
  ModelSpec with_points(double hbar, std::size_t points) const;
};

struct HeatSettings {
  std::vector<double> times{0.04, 0.02, 0.01, 0.005, 0.002, 0.001};
  std::vector<Point> points{{0.0, 0.0}};
  double sqrt_t_cells = 20.0;  // dx = sqrt(t) / sqrt_t_cells
  double sqrt_t_width = 12.0;  // L = sqrt_t_width * sqrt(t)
};

struct ManybodySettings {
  int modes = 8;
  std::optional<int> max_particles;  // defaults to modes
};

struct PhaseSettings {
  double momentum_margin = 2.0;
  double momentum_spacing = 0.25;  // in units of sqrt(hbar)
};

struct RunConfig {
  ModelTemplate model;
  ResolutionRule resolution;
  ScfConfig scf;
  TfFixedPointConfig tf_fixed_point;
  TfMinimizeConfig tf_minimize;
  std::optional<std::size_t> tf_points;
  HeatSettings heat;
  ManybodySettings manybody;
  PhaseSettings phase;
};

/// Throws ConfigError with the offending key on malformed input.
ModelTemplate parse_model(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace weyl
