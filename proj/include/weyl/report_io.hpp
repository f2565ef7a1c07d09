#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "weyl/sweep.hpp"

namespace weyl {

inline constexpr int schema_version = 1;

/// Shortest round-trip text for a double ("%.17g"); empty for NaN.
std::string format_number(double v);

/// Record columns, in this order:
///   hbar, points, e_rhf, e_hf, trace_rhf, trace_hf, exchange_scaled, exchange_ratio,
///   trace_bound, residual_rhf, residual_hf, projector_residual_rhf, projector_residual_hf,
///   converged_rhf, converged_hf, manybody_energy, manybody_hf_energy, e_tf, mass_tf,
///   then rho_rhf@<x>, rho_hf@<x>, rho_tf@<x> per probe, then notes.
/// Absent values are empty cells.
std::vector<std::string> record_columns(const SweepPlan& plan);
void write_records_csv(std::ostream& out, const SweepPlan& plan, const SweepSummary& summary);

/// Columns: hbar, x, y, value, target, diff.
void write_pointwise_csv(std::ostream& out, const std::vector<PointwiseRow>& rows);

nlohmann::json summary_json(const SweepPlan& plan, const SweepSummary& summary);
nlohmann::json record_json(const SweepRecord& r);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polyline plot with a frame and min/max tick labels. Non-positive values are
/// dropped on log axes.
void write_svg_plot(std::ostream& out, const std::string& title, const std::vector<PlotSeries>& series,
                    bool log_x, bool log_y);

/// Writes records.csv, pointwise.csv, summary.json (and plots/*.svg when asked) into dir.
void write_sweep_outputs(const std::filesystem::path& dir, const SweepPlan& plan, const SweepSummary& summary,
                         bool plots);

}  // namespace weyl
