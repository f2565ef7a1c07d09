#include "weyl/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "weyl/errors.hpp"

namespace weyl {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

// Headers only: shortest form that round-trips typical plan literals (0.8, not 0.80000000000000004).
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string probe_label(const Point& p, int dim) {
  return dim == 1 ? short_number(p[0]) : short_number(p[0]) + ";" + short_number(p[1]);
}

// Notes may contain commas or quotes; RFC 4180 quoting.
std::string csv_quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
  out << '\n';
}

std::optional<double> pick(const std::optional<StateSummary>& s, double StateSummary::*field) {
  if (!s) return std::nullopt;
  return (*s).*field;
}

}  // namespace

std::vector<std::string> record_columns(const SweepPlan& plan) {
  std::vector<std::string> cols{"hbar",
                                "points",
                                "e_rhf",
                                "e_hf",
                                "trace_rhf",
                                "trace_hf",
                                "exchange_scaled",
                                "exchange_ratio",
                                "trace_bound",
                                "residual_rhf",
                                "residual_hf",
                                "projector_residual_rhf",
                                "projector_residual_hf",
                                "converged_rhf",
                                "converged_hf",
                                "manybody_energy",
                                "manybody_hf_energy",
                                "e_tf",
                                "mass_tf"};
  const int dim = plan.config.model.dim;
  for (const char* prefix : {"rho_rhf@", "rho_hf@", "rho_tf@"})
    for (const Point& p : plan.probes) cols.push_back(prefix + probe_label(p, dim));
  cols.push_back("notes");
  return cols;
}

void write_records_csv(std::ostream& out, const SweepPlan& plan, const SweepSummary& summary) {
  write_row(out, record_columns(plan));
  const std::size_t probes = plan.probes.size();
  for (const SweepRecord& r : summary.records) {
    std::vector<std::string> row{format_number(r.hbar), std::to_string(r.points)};
    row.push_back(r.rhf ? format_number(r.rhf->energy.total) : "");
    row.push_back(r.hf ? format_number(r.hf->energy.total) : "");
    row.push_back(cell(pick(r.rhf, &StateSummary::scaled_trace)));
    row.push_back(cell(pick(r.hf, &StateSummary::scaled_trace)));
    row.push_back(cell(r.exchange_scaled));
    row.push_back(cell(r.exchange_ratio));
    row.push_back(cell(r.trace_bound));
    row.push_back(cell(pick(r.rhf, &StateSummary::residual)));
    row.push_back(cell(pick(r.hf, &StateSummary::residual)));
    row.push_back(cell(pick(r.rhf, &StateSummary::projector_residual)));
    row.push_back(cell(pick(r.hf, &StateSummary::projector_residual)));
    row.push_back(r.rhf ? (r.rhf->converged ? "1" : "0") : "");
    row.push_back(r.hf ? (r.hf->converged ? "1" : "0") : "");
    row.push_back(cell(r.manybody_energy));
    row.push_back(cell(r.manybody_hf_energy));
    row.push_back(summary.tf ? format_number(summary.tf->energy) : "");
    row.push_back(summary.tf ? format_number(summary.tf->mass) : "");
    for (std::size_t k = 0; k < probes; ++k) row.push_back(r.rhf ? format_number(r.rhf->probe_density[k]) : "");
    for (std::size_t k = 0; k < probes; ++k) row.push_back(r.hf ? format_number(r.hf->probe_density[k]) : "");
    for (std::size_t k = 0; k < probes; ++k) row.push_back(summary.tf ? format_number(summary.tf->probe_density[k]) : "");
    std::string notes;
    for (const auto& n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
    row.push_back(notes.empty() ? "" : csv_quoted(notes));
    write_row(out, row);
  }
}

void write_pointwise_csv(std::ostream& out, const std::vector<PointwiseRow>& rows) {
  out << "hbar,x,y,value,target,diff\n";
  for (const auto& r : rows)
    write_row(out, {format_number(r.hbar), format_number(r.x[0]), format_number(r.x[1]), format_number(r.value),
                    format_number(r.target), format_number(r.diff)});
}

namespace {

json state_json(const StateSummary& s) {
  return json{{"energy", s.energy},
              {"scaled_trace", s.scaled_trace},
              {"residual", s.residual},
              {"off_shell_residual", s.off_shell_residual},
              {"projector_residual", s.projector_residual},
              {"degeneracy", s.degeneracy},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"probe_density", s.probe_density}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json record_json(const SweepRecord& r) {
  json j{{"hbar", r.hbar},
         {"points", r.points},
         {"rhf", r.rhf ? state_json(*r.rhf) : json(nullptr)},
         {"hf", r.hf ? state_json(*r.hf) : json(nullptr)},
         {"exchange_scaled", optional_json(r.exchange_scaled)},
         {"exchange_ratio", optional_json(r.exchange_ratio)},
         {"trace_bound", optional_json(r.trace_bound)},
         {"husimi", r.husimi ? json(*r.husimi) : json(nullptr)},
         {"manybody_energy", optional_json(r.manybody_energy)},
         {"manybody_hf_energy", optional_json(r.manybody_hf_energy)},
         {"notes", r.notes}};
  return j;
}

json summary_json(const SweepPlan& plan, const SweepSummary& s) {
  json j;
  j["schema_version"] = schema_version;
  j["hbar"] = plan.hbars;
  json solvers = json::array();
  for (SolverKind k : plan.solvers) solvers.push_back(solver_name(k));
  j["solvers"] = solvers;
  json probes = json::array();
  for (const Point& p : plan.probes) probes.push_back(plan.config.model.dim == 1 ? json(p[0]) : json{p[0], p[1]});
  j["probes"] = probes;

  json records = json::array();
  for (const auto& r : s.records) records.push_back(record_json(r));
  j["records"] = records;

  if (s.tf) {
    j["thomas_fermi"] = {{"points", s.tf->points},
                         {"energy", s.tf->energy},
                         {"energy_minimize", s.tf->energy_minimize},
                         {"mass", s.tf->mass},
                         {"density_gap", s.tf->density_gap},
                         {"energy_gap", s.tf->energy_gap},
                         {"converged", s.tf->converged},
                         {"probe_density", s.tf->probe_density}};
  } else {
    j["thomas_fermi"] = nullptr;
  }
  j["slopes"] = {{"rhf", optional_json(s.slope_rhf)}, {"hf", optional_json(s.slope_hf)}};
  j["trace_bound"] = {{"constant", optional_json(s.trace_bound_constant)}, {"violations", s.trace_bound_violations}};
  if (s.guard) {
    j["grid_guard"] = {{"hbar", s.guard->hbar},
                       {"points", s.guard->points},
                       {"refined_points", s.guard->refined_points},
                       {"energy", s.guard->energy},
                       {"refined_energy", s.guard->refined_energy},
                       {"difference", s.guard->difference},
                       {"tolerance", s.guard->tolerance},
                       {"passed", s.guard->passed}};
  } else {
    j["grid_guard"] = nullptr;
  }
  j["heat"] = s.heat ? json(*s.heat) : json(nullptr);
  j["bathtub_vlasov_energy"] = optional_json(s.bathtub_vlasov_energy);
  json pw = json::array();
  for (const auto& r : s.pointwise)
    pw.push_back({{"hbar", r.hbar}, {"x", r.x}, {"value", r.value}, {"target", r.target}, {"diff", r.diff}});
  j["pointwise"] = pw;
  return j;
}

void write_svg_plot(std::ostream& out, const std::string& title, const std::vector<PlotSeries>& series, bool log_x,
                    bool log_y) {
  constexpr double width = 640, height = 420, margin = 60;
  auto tx = [log_x](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k)
      if (usable(s.x[k], s.y[k])) {
        x0 = std::min(x0, tx(s.x[k]));
        x1 = std::max(x1, tx(s.x[k]));
        y0 = std::min(y0, ty(s.y[k]));
        y1 = std::max(y1, ty(s.y[k]));
      }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return margin + (tx(v) - x0) / (x1 - x0) * (width - 2 * margin); };
  auto py = [&](double v) { return height - margin - (ty(v) - y0) / (y1 - y0) * (height - 2 * margin); };
  auto untx = [log_x](double v) { return log_x ? std::pow(10.0, v) : v; };
  auto unty = [log_y](double v) { return log_y ? std::pow(10.0, v) : v; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
      << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 18 << "\" font-size=\"11\">"
      << format_number(untx(x0)) << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_number(untx(x1)) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << height - margin << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_number(unty(y0)) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 10 << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_number(unty(y1)) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % std::size(colors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(series[s].x.size(), series[s].y.size()); ++k)
      if (usable(series[s].x[k], series[s].y[k])) out << px(series[s].x[k]) << ',' << py(series[s].y[k]) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 4 << "\" y=\"" << margin + 16 + 14 * static_cast<double>(s)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << series[s].name << "</text>\n";
  }
  out << "</svg>\n";
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_sweep_outputs(const std::filesystem::path& dir, const SweepPlan& plan, const SweepSummary& summary,
                         bool plots) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "records.csv");
    write_records_csv(out, plan, summary);
  }
  {
    auto out = open_output(dir / "pointwise.csv");
    write_pointwise_csv(out, summary.pointwise);
  }
  {
    auto out = open_output(dir / "summary.json");
    out << summary_json(plan, summary).dump(2) << '\n';
  }
  if (!plots) return;
  std::filesystem::create_directories(dir / "plots");
  std::vector<double> h;
  for (const auto& r : summary.records) h.push_back(r.hbar);
  if (summary.tf) {
    PlotSeries rhf{"|e_rHF - e_TF|", h, {}}, hf{"|e_HF - e_TF|", h, {}};
    for (const auto& r : summary.records) {
      rhf.y.push_back(r.rhf ? std::abs(r.rhf->energy.total - summary.tf->energy) : std::nan(""));
      hf.y.push_back(r.hf ? std::abs(r.hf->energy.total - summary.tf->energy) : std::nan(""));
    }
    auto out = open_output(dir / "plots" / "energy_error.svg");
    write_svg_plot(out, "energy error vs hbar", {rhf, hf}, true, true);
  }
  {
    PlotSeries ratio{"hbar^{2d} Ex / |e_HF|", h, {}};
    for (const auto& r : summary.records) ratio.y.push_back(r.exchange_ratio.value_or(std::nan("")));
    auto out = open_output(dir / "plots" / "exchange_ratio.svg");
    write_svg_plot(out, "exchange ratio vs hbar", {ratio}, true, true);
  }
  {
    PlotSeries trace{"hbar^d tr gamma (rHF)", h, {}};
    for (const auto& r : summary.records) trace.y.push_back(r.rhf ? r.rhf->scaled_trace : std::nan(""));
    auto out = open_output(dir / "plots" / "trace.svg");
    write_svg_plot(out, "scaled trace vs hbar", {trace}, true, false);
  }
}

}  // namespace weyl
