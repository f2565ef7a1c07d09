#include "weyl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "weyl/errors.hpp"
#include "weyl/manybody.hpp"
#include "weyl/scf.hpp"
#include "weyl/thomas_fermi.hpp"

namespace weyl {

namespace fs = std::filesystem;
using nlohmann::json;

SolverKind parse_solver(const std::string& name) {
  if (name == "hf") return SolverKind::hf;
  if (name == "rhf") return SolverKind::rhf;
  if (name == "tf") return SolverKind::tf;
  if (name == "vlasov") return SolverKind::vlasov;
  if (name == "heat") return SolverKind::heat;
  if (name == "manybody") return SolverKind::manybody;
  throw ConfigError("unknown solver '" + name + "'");
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::hf: return "hf";
    case SolverKind::rhf: return "rhf";
    case SolverKind::tf: return "tf";
    case SolverKind::vlasov: return "vlasov";
    case SolverKind::heat: return "heat";
    case SolverKind::manybody: return "manybody";
  }
  return "?";
}

void SweepPlan::validate() const {
  if (hbars.empty()) throw ConfigError("sweep needs at least one hbar value");
  for (std::size_t k = 0; k < hbars.size(); ++k) {
    if (!(hbars[k] > 0.0)) throw ConfigError("hbar values must be positive");
    if (k > 0 && !(hbars[k] < hbars[k - 1])) throw ConfigError("hbar list must be strictly decreasing");
  }
  if (solvers.empty()) throw ConfigError("sweep needs at least one solver");
  if (guard.tolerance && !(*guard.tolerance > 0.0)) throw ConfigError("grid_guard.tolerance must be positive");
}

SweepPlan parse_sweep_plan(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("sweep plan must be an object");
  static const std::set<std::string> plan_keys{"model", "model_file", "hbar", "solvers", "probes", "grid_guard", "output"};
  static const std::set<std::string> section_keys{"resolution", "scf", "thomas_fermi", "heat", "manybody", "phase_space"};
  for (const auto& item : j.items())
    if (!plan_keys.count(item.key()) && !section_keys.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in sweep plan");

  json merged;
  fs::path model_base = base;
  if (j.contains("model_file")) {
    const fs::path file = fs::path(j.at("model_file").get<std::string>());
    const fs::path full = file.is_absolute() || base.empty() ? file : base / file;
    merged = read_json_file(full);
    model_base = full.parent_path();
  } else if (j.contains("model")) {
    merged = j.at("model");
  } else {
    throw ConfigError("sweep plan needs 'model' or 'model_file'");
  }
  if (!merged.is_object()) throw ConfigError("model must be an object");
  for (const auto& key : section_keys)
    if (j.contains(key)) merged[key] = j.at(key);

  SweepPlan plan;
  plan.config = parse_run_config(merged, model_base);
  try {
    plan.hbars = j.at("hbar").get<std::vector<double>>();
    for (const auto& s : j.at("solvers")) plan.solvers.insert(parse_solver(s.get<std::string>()));
  } catch (const json::exception&) {
    throw ConfigError("sweep plan needs 'hbar' (list of numbers) and 'solvers' (list of names)");
  }
  if (j.contains("probes")) {
    for (const auto& p : j.at("probes")) {
      if (p.is_number()) plan.probes.push_back({p.get<double>(), 0.0});
      else if (p.is_array() && !p.empty() && p.size() <= 2)
        plan.probes.push_back({p[0].get<double>(), p.size() == 2 ? p[1].get<double>() : 0.0});
      else throw ConfigError("probes must be numbers or [x] / [x, y]");
    }
  } else {
    plan.probes.push_back({0.0, 0.0});
  }
  if (j.contains("grid_guard")) {
    const json& g = j.at("grid_guard");
    if (!g.is_object()) throw ConfigError("grid_guard must be an object");
    for (const auto& item : g.items())
      if (item.key() != "enabled" && item.key() != "tolerance")
        throw ConfigError("unknown key '" + item.key() + "' in grid_guard");
    plan.guard.enabled = g.value("enabled", true);
    if (g.contains("tolerance")) plan.guard.tolerance = g.at("tolerance").get<double>();
  }
  if (j.contains("output")) plan.output = j.at("output").get<std::string>();
  plan.validate();
  return plan;
}

SweepPlan load_sweep_plan(const fs::path& path) { return parse_sweep_plan(read_json_file(path), path.parent_path()); }

std::vector<PointwiseRow> weyl_pointwise_table(const std::vector<std::pair<double, Density>>& scaled_densities,
                                               const std::vector<Point>& probes, const Density& rho_tf) {
  std::vector<PointwiseRow> rows;
  for (const auto& [hbar, rho] : scaled_densities)
    for (const Point& x : probes) {
      PointwiseRow r;
      r.hbar = hbar;
      r.x = x;
      r.value = interpolate(rho.grid(), rho.values(), x);
      r.target = interpolate(rho_tf.grid(), rho_tf.values(), x);
      r.diff = std::abs(r.value - r.target);
      rows.push_back(r);
    }
  return rows;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k)
    if (x[k] > 0.0 && std::isfinite(y[k]) && std::abs(y[k]) > 0.0) pts.emplace_back(std::log(x[k]), std::log(std::abs(y[k])));
  if (pts.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [a, b] : pts) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace {

std::vector<double> probe_values(const Grid& grid, const Field& f, const std::vector<Point>& probes) {
  std::vector<double> out;
  for (const Point& p : probes) out.push_back(interpolate(grid, f, p));
  return out;
}

StateSummary summarize(const ModelOperators& ops, const ScfResult& r, const std::vector<Point>& probes) {
  StateSummary s;
  s.energy = r.report.final_energy;
  s.scaled_trace = r.report.scaled_trace;
  s.residual = r.report.residual;
  s.off_shell_residual = r.report.off_shell_residual;
  const Eigen::MatrixXd& g = r.gamma.matrix();
  s.projector_residual = (g * g - g).norm();
  s.degeneracy = r.report.degeneracy;
  s.iterations = r.report.iterations;
  s.converged = r.report.converged;
  s.probe_density = probe_values(ops.grid(), ops.model().hbar_d() * r.gamma.density(), probes);
  return s;
}

// Non-interacting models: the minimizer is 1{H0 < 0} exactly, kept factored so that
// fine grids never form a dense Gamma. HF and rHF coincide.
StateSummary projector_summary(const ModelOperators& ops, const std::vector<Point>& probes, double& trace_bound) {
  const ModelSpec& model = ops.model();
  const SpectralProjector p = spectral_projector(ops.one_body(), 0.0, ProjectorMode::strict);
  StateSummary s;
  s.energy = hf_energy(ops, p, false);
  s.scaled_trace = model.hbar_d() * p.trace();
  const auto k = p.occupied.cols();
  // ||U U^T U U^T - U U^T||_F = ||U^T U - I||_F for full-rank U.
  s.projector_residual = (p.occupied.transpose() * p.occupied - Eigen::MatrixXd::Identity(k, k)).norm();
  s.degeneracy = p.degeneracy;
  s.converged = true;
  s.probe_density = probe_values(ops.grid(), model.hbar_d() * p.density(), probes);
  trace_bound = model.hbar_d() * (p.occupied_energies.array() + model.chemical_potential() + 1.0).sum();
  return s;
}

void run_factored(const SweepPlan& plan, const ModelOperators& ops, SweepRecord& rec) {
  double bound = 0.0;
  const StateSummary st = projector_summary(ops, plan.probes, bound);
  if (plan.runs(SolverKind::rhf)) rec.rhf = st;
  if (plan.runs(SolverKind::hf)) {
    rec.hf = st;
    rec.exchange_scaled = 0.0;
    rec.exchange_ratio = 0.0;
  }
  rec.trace_bound = bound;
  const ModelSpec& model = ops.model();
  rec.rho_scaled = model.hbar_d() * spectral_projector(ops.one_body(), 0.0, ProjectorMode::strict).density();
  if (plan.runs(SolverKind::vlasov)) rec.notes.push_back("husimi skipped: non-interacting state kept factored");
}

void run_dense(const SweepPlan& plan, const ModelOperators& ops, SweepRecord& rec) {
  const RunConfig& cfg = plan.config;
  const ModelSpec& model = ops.model();
  std::optional<DensityMatrix> rhf_state;
  if (plan.runs(SolverKind::rhf)) {
    try {
      ScfConfig c = cfg.scf;
      c.include_exchange = false;
      ScfResult r = scf_solve(ops, c);
      rec.rhf = summarize(ops, r, plan.probes);
      if (!r.report.converged) rec.notes.push_back("rhf: " + r.report.message);
      rhf_state = std::move(r.gamma);
    } catch (const std::exception& e) {
      rec.notes.push_back(std::string("rhf failed: ") + e.what());
    }
  }
  std::optional<DensityMatrix> hf_state;
  if (plan.runs(SolverKind::hf)) {
    try {
      ScfConfig c = cfg.scf;
      c.include_exchange = true;
      // Warm start from the rHF minimizer; the HF functional is then descended from there.
      if (rhf_state) {
        c.initial_state = InitialState::supplied;
        c.supplied_state = rhf_state->matrix();
      }
      ScfResult r = scf_solve(ops, c);
      rec.hf = summarize(ops, r, plan.probes);
      const double hd = model.hbar_d();
      const double ex = hd * hd * exchange_term(ops.kernel(), r.gamma.matrix());
      rec.exchange_scaled = ex;
      if (r.report.final_energy.total != 0.0) rec.exchange_ratio = ex / std::abs(r.report.final_energy.total);
      if (!r.report.converged) rec.notes.push_back("hf: " + r.report.message);
      hf_state = std::move(r.gamma);
    } catch (const std::exception& e) {
      rec.notes.push_back(std::string("hf failed: ") + e.what());
    }
  }
  const DensityMatrix* state = rhf_state ? &*rhf_state : (hf_state ? &*hf_state : nullptr);
  if (!state) return;
  rec.trace_bound = trace_bound_value(ops, *state);
  rec.rho_scaled = model.hbar_d() * state->density();
  if (plan.runs(SolverKind::vlasov)) {
    try {
      const CoherentFamily family = CoherentFamily::gaussian(model.dim(), model.hbar());
      const PhaseGrid phase = default_phase_grid(model, cfg.phase.momentum_margin, cfg.phase.momentum_spacing);
      rec.husimi = kinetic_identity_check(*state, family, phase, model);
    } catch (const std::exception& e) {
      rec.notes.push_back(std::string("husimi failed: ") + e.what());
    }
  }
}

SweepRecord run_point(const SweepPlan& plan, double hbar) {
  const RunConfig& cfg = plan.config;
  const ModelSpec model = cfg.model.instantiate(hbar, cfg.resolution);
  const ModelOperators ops(model);
  SweepRecord rec;
  rec.hbar = hbar;
  rec.points = model.grid().points_per_axis();
  if (plan.runs(SolverKind::rhf) || plan.runs(SolverKind::hf)) {
    if (model.non_interacting()) run_factored(plan, ops, rec);
    else run_dense(plan, ops, rec);
  }
  if (plan.runs(SolverKind::manybody)) {
    try {
      const ModeBasis basis = project_modes(model, cfg.manybody.modes);
      const SectorSpectrum s = grand_canonical_ground(basis, cfg.manybody.max_particles.value_or(basis.modes()));
      rec.manybody_energy = s.ground_energy;
      rec.manybody_hf_energy = mode_hartree_fock(basis).energy;
    } catch (const std::exception& e) {
      rec.notes.push_back(std::string("manybody failed: ") + e.what());
    }
  }
  return rec;
}

TfTargets solve_tf(const SweepPlan& plan) {
  const RunConfig& cfg = plan.config;
  const double smallest = plan.hbars.back();
  const std::size_t n = cfg.tf_points ? *cfg.tf_points : cfg.model.instantiate(smallest, cfg.resolution).grid().points_per_axis();
  const ModelSpec model = cfg.model.with_points(smallest, n);
  const ModelOperators ops(model);
  const TfResult fp = tf_fixed_point(ops, cfg.tf_fixed_point);
  const TfResult pg = tf_minimize(ops, cfg.tf_minimize);
  TfTargets t;
  t.points = n;
  t.energy = fp.report.energy.total;
  t.energy_minimize = pg.report.energy.total;
  t.mass = fp.report.mass;
  t.density_gap = l1_norm(model.grid(), fp.rho.values() - pg.rho.values());
  t.energy_gap = std::abs(t.energy - t.energy_minimize);
  t.converged = fp.report.converged && pg.report.converged;
  t.probe_density = probe_values(model.grid(), fp.rho.values(), plan.probes);
  t.rho = fp.rho;
  return t;
}

}  // namespace

SweepSummary run_sweep(const SweepPlan& plan, int threads, std::ostream* log) {
  plan.validate();
  SweepSummary summary;
  const bool any_scf = plan.runs(SolverKind::rhf) || plan.runs(SolverKind::hf) || plan.runs(SolverKind::manybody);
  std::mutex log_mutex;

  if (plan.runs(SolverKind::tf) || plan.runs(SolverKind::vlasov)) summary.tf = solve_tf(plan);

  if (any_scf) {
    summary.records.resize(plan.hbars.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < plan.hbars.size(); k = next++) {
        summary.records[k] = run_point(plan, plan.hbars[k]);
        if (log) {
          const std::lock_guard lock(log_mutex);
          *log << "hbar = " << plan.hbars[k] << " done (" << summary.records[k].points << " points)\n";
        }
      }
    };
    const int pool = std::max(1, std::min<int>(threads, static_cast<int>(plan.hbars.size())));
    std::vector<std::thread> workers;
    for (int k = 1; k < pool; ++k) workers.emplace_back(worker);
    worker();
    for (auto& w : workers) w.join();
    // Slots follow the validated (strictly decreasing) hbar order.
  }

  if (summary.tf) {
    std::vector<double> h, err_rhf, err_hf;
    for (const auto& r : summary.records) {
      h.push_back(r.hbar);
      err_rhf.push_back(r.rhf ? r.rhf->energy.total - summary.tf->energy : std::nan(""));
      err_hf.push_back(r.hf ? r.hf->energy.total - summary.tf->energy : std::nan(""));
    }
    summary.slope_rhf = loglog_slope(h, err_rhf);
    summary.slope_hf = loglog_slope(h, err_hf);
    std::vector<std::pair<double, Density>> scaled;
    for (const auto& r : summary.records)
      if (r.rho_scaled.size() > 0) {
        const ModelSpec m = plan.config.model.instantiate(r.hbar, plan.config.resolution);
        scaled.emplace_back(r.hbar, Density(m.grid(), r.rho_scaled.cwiseMax(0.0)));
      }
    summary.pointwise = weyl_pointwise_table(scaled, plan.probes, *summary.tf->rho);
    if (plan.runs(SolverKind::vlasov)) {
      const ModelSpec m = plan.config.model.with_points(plan.hbars.back(), summary.tf->points);
      const double margin = plan.config.phase.momentum_margin;
      const double xi = margin * fermi_momentum(m.potential(), m.grid(), m.chemical_potential());
      // Fine momentum cells: the midpoint rule in the Vlasov kinetic term is second order in the cell size.
      const PhaseGrid phase(m.grid(), xi, 2 * static_cast<std::size_t>(std::ceil(xi / 1e-3)) + 1);
      summary.bathtub_vlasov_energy =
          vlasov_energy(m, bathtub_lift(*summary.tf->rho, TfConstants::for_dim(m.dim()), phase)).total;
    }
  }

  for (const auto& r : summary.records)
    if (r.trace_bound) {
      if (!summary.trace_bound_constant) summary.trace_bound_constant = *r.trace_bound;
      else if (*r.trace_bound > 2.0 * *summary.trace_bound_constant) summary.trace_bound_violations.push_back(r.hbar);
    }

  if (plan.guard.enabled && (plan.runs(SolverKind::rhf) || plan.runs(SolverKind::hf)) && !summary.records.empty()) {
    const SweepRecord& last = summary.records.back();
    const bool use_rhf = plan.runs(SolverKind::rhf);
    const std::optional<StateSummary>& base = use_rhf ? last.rhf : last.hf;
    if (base) {
      GridGuardResult g;
      g.hbar = last.hbar;
      g.points = last.points;
      g.refined_points = 2 * last.points - 1;
      g.energy = base->energy.total;
      g.tolerance = plan.guard.tolerance.value_or(10.0 * plan.config.scf.tol_energy);
      try {
        const ModelOperators refined(plan.config.model.with_points(last.hbar, g.refined_points));
        if (refined.model().non_interacting()) {
          double unused = 0.0;
          g.refined_energy = projector_summary(refined, {}, unused).energy.total;
        } else {
          ScfConfig c = plan.config.scf;
          c.include_exchange = !use_rhf;
          g.refined_energy = scf_solve(refined, c).report.final_energy.total;
        }
        g.difference = std::abs(g.refined_energy - g.energy);
        g.passed = g.difference <= g.tolerance;
      } catch (const std::exception& e) {
        g.refined_energy = std::nan("");
        g.difference = std::nan("");
        g.passed = false;
        summary.records.back().notes.push_back(std::string("grid guard failed: ") + e.what());
      }
      summary.guard = g;
    }
  }

  if (plan.runs(SolverKind::heat)) {
    const ModelTemplate& m = plan.config.model;
    summary.heat = heat_tauberian_report(m.potential, m.chemical_potential, m.dim, plan.config.heat);
  }
  return summary;
}

}  // namespace weyl
