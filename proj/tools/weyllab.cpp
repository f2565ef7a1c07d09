#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "weyl/config.hpp"
#include "weyl/errors.hpp"
#include "weyl/heat.hpp"
#include "weyl/manybody.hpp"
#include "weyl/model.hpp"
#include "weyl/phase_space.hpp"
#include "weyl/report_io.hpp"
#include "weyl/scf.hpp"
#include "weyl/sweep.hpp"
#include "weyl/thomas_fermi.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace weyl;

namespace {

enum Exit : int { ok = 0, config_invalid = 2, not_converged = 3, invariant = 4 };

struct Globals {
  std::optional<fs::path> out;
  std::string format = "json";
  bool plot = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

json validation_json(const ModelSpec& model, const ValidationReport& r) {
  return json{{"dim", model.dim()},
              {"points", model.grid().points_per_axis()},
              {"spacing", model.grid().spacing()},
              {"hbar", model.hbar()},
              {"even", r.even},
              {"evenness_defect", r.evenness_defect},
              {"repulsivity", r.mode == RepulsivityMode::fourier_nonneg ? "fourier_nonneg" : "smallness_d12"},
              {"fourier_min", r.fourier_min},
              {"fourier_nonneg", r.fourier_nonneg},
              {"negative_part_sup", r.negative_part_sup},
              {"smallness_threshold", r.smallness_threshold ? json(*r.smallness_threshold) : json(nullptr)},
              {"smallness_ok", r.smallness_ok},
              {"confinement_margin", r.confinement_margin},
              {"confined", r.confined},
              {"failures", r.failures},
              {"ok", r.ok()}};
}

void require_valid(const ModelSpec& model) {
  const ValidationReport r = validate_model(model);
  if (r.ok()) return;
  std::string msg = "model rejected:";
  for (const auto& f : r.failures) msg += " " + f + ";";
  throw ConfigError(msg);
}

std::ofstream open_in(const Globals& g, const std::string& name) {
  fs::create_directories(*g.out);
  std::ofstream out(*g.out / name);
  if (!out) throw ConfigError("cannot write " + (*g.out / name).string());
  return out;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_validate(const Globals&, const fs::path& path) {
  const RunConfig cfg = load_run_config(path);
  const ModelSpec model = cfg.model.instantiate(cfg.resolution);
  const ValidationReport r = validate_model(model);
  print_json(validation_json(model, r));
  return r.ok() ? Exit::ok : Exit::config_invalid;
}

int cmd_tf(const Globals& g, const fs::path& path, int trials) {
  const RunConfig cfg = load_run_config(path);
  const ModelSpec model = cfg.tf_points ? cfg.model.with_points(cfg.model.hbar, *cfg.tf_points)
                                        : cfg.model.instantiate(cfg.resolution);
  require_valid(model);
  const ModelOperators ops(model);
  const TfResult fp = tf_fixed_point(ops, cfg.tf_fixed_point);
  const TfResult pg = tf_minimize(ops, cfg.tf_minimize);
  json j{{"fixed_point", fp.report},
         {"projected_gradient", pg.report},
         {"density_gap", l1_norm(model.grid(), fp.rho.values() - pg.rho.values())},
         {"energy_gap", std::abs(fp.report.energy.total - pg.report.energy.total)}};
  if (trials > 0) {
    const double xi = cfg.phase.momentum_margin *
                      fermi_momentum(model.potential(), model.grid(), model.chemical_potential());
    const PhaseGrid phase(model.grid(), xi, 2 * static_cast<std::size_t>(std::ceil(xi / 1e-3)) + 1);
    const HusimiField lift = bathtub_lift(fp.rho, TfConstants::for_dim(model.dim()), phase);
    j["vlasov_bathtub"] = vlasov_energy(model, lift);
    j["rearrangements"] = rearrangement_check(model, lift, g.seed, trials);
  }
  if (g.out) {
    auto density = open_in(g, "tf_density.txt");
    write_density_text(density, fp.rho);
    open_in(g, "tf.json") << j.dump(2) << '\n';
  }
  if (g.format == "csv") {
    std::cout << "x,rho_fixed_point,rho_projected_gradient\n";
    for (std::size_t i = 0; i < model.grid().size(); ++i)
      std::cout << format_number(model.grid().point(i)[0]) << ',' << format_number(fp.rho.values()[static_cast<Eigen::Index>(i)])
                << ',' << format_number(pg.rho.values()[static_cast<Eigen::Index>(i)]) << '\n';
  } else {
    print_json(j);
  }
  return fp.report.converged && pg.report.converged ? Exit::ok : Exit::not_converged;
}

ScfResult solve_at(const RunConfig& cfg, const ModelOperators& ops, bool reduced) {
  ScfConfig c = cfg.scf;
  c.include_exchange = !reduced;
  return scf_solve(ops, c);
}

int cmd_scf(const Globals& g, const fs::path& path, std::optional<double> hbar, bool reduced) {
  const RunConfig cfg = load_run_config(path);
  const ModelSpec model = cfg.model.instantiate(hbar.value_or(cfg.model.hbar), cfg.resolution);
  require_valid(model);
  const ModelOperators ops(model);
  const ScfResult r = solve_at(cfg, ops, reduced);
  const json j{{"hbar", model.hbar()},
               {"points", model.grid().points_per_axis()},
               {"functional", reduced ? "rhf" : "hf"},
               {"report", r.report},
               {"certificate", minimizer_certificate(ops, r.gamma, !reduced)},
               {"trace_bound", trace_bound_value(ops, r.gamma)}};
  if (g.out) {
    auto traj = open_in(g, "trajectory.csv");
    r.report.write_trajectory_csv(traj);
    auto density = open_in(g, "density.txt");
    write_density_text(density, Density(model.grid(), model.hbar_d() * r.gamma.density()));
    open_in(g, "scf.json") << j.dump(2) << '\n';
  }
  if (g.format == "csv") r.report.write_trajectory_csv(std::cout);
  else print_json(j);
  return r.report.converged ? Exit::ok : Exit::not_converged;
}

int cmd_sweep(const Globals& g, const fs::path& path) {
  const SweepPlan plan = load_sweep_plan(path);
  require_valid(plan.config.model.instantiate(plan.hbars.front(), plan.config.resolution));
  const SweepSummary summary = run_sweep(plan, g.threads, &std::cerr);
  if (summary.guard && !summary.guard->passed)
    std::cerr << "warning: grid guard at hbar " << summary.guard->hbar << ": |e(" << summary.guard->points
              << ") - e(" << summary.guard->refined_points << ")| = " << summary.guard->difference
              << " exceeds " << summary.guard->tolerance
              << "; Weyl-law errors at this hbar include discretization error\n";
  const fs::path dir = g.out ? *g.out : plan.output;
  if (!dir.empty()) write_sweep_outputs(dir, plan, summary, g.plot);
  if (g.format == "csv") write_records_csv(std::cout, plan, summary);
  else print_json(summary_json(plan, summary));
  bool converged = !summary.tf || summary.tf->converged;
  for (const auto& r : summary.records)
    converged = converged && r.notes.empty() && (!r.rhf || r.rhf->converged) && (!r.hf || r.hf->converged);
  return converged ? Exit::ok : Exit::not_converged;
}

int cmd_heat(const Globals& g, const fs::path& path) {
  const RunConfig cfg = load_run_config(path);
  const HeatReport r = heat_tauberian_report(cfg.model.potential, cfg.model.chemical_potential, cfg.model.dim, cfg.heat);
  if (g.out) open_in(g, "heat.json") << json(r).dump(2) << '\n';
  if (g.format == "csv") {
    std::cout << "t,x,y,points,value,target,rel_error\n";
    for (const auto& row : r.rows)
      std::cout << format_number(row.t) << ',' << format_number(row.x[0]) << ',' << format_number(row.x[1]) << ','
                << row.points << ',' << format_number(row.value) << ',' << format_number(row.target) << ','
                << format_number(row.rel_error) << '\n';
  } else {
    print_json(r);
  }
  return Exit::ok;
}

int cmd_husimi(const Globals& g, const fs::path& path, std::optional<double> hbar, bool reduced) {
  const RunConfig cfg = load_run_config(path);
  const ModelSpec model = cfg.model.instantiate(hbar.value_or(cfg.model.hbar), cfg.resolution);
  require_valid(model);
  const ModelOperators ops(model);
  const ScfResult r = solve_at(cfg, ops, reduced);
  const CoherentFamily family = CoherentFamily::gaussian(model.dim(), model.hbar());
  const PhaseGrid phase = default_phase_grid(model, cfg.phase.momentum_margin, cfg.phase.momentum_spacing);
  const HusimiField m = husimi_transform(r.gamma, family, phase);
  const json j{{"hbar", model.hbar()},
               {"points", model.grid().points_per_axis()},
               {"momentum_points", phase.momentum_points_per_axis()},
               {"functional", reduced ? "rhf" : "hf"},
               {"scf_converged", r.report.converged},
               {"identities", kinetic_identity_check(r.gamma, m, family, model)},
               {"vlasov_energy", vlasov_energy(model, m)}};
  if (g.out) {
    auto field = open_in(g, "husimi.txt");
    m.write_text(field);
    open_in(g, "husimi.json") << j.dump(2) << '\n';
  }
  print_json(j);
  return r.report.converged ? Exit::ok : Exit::not_converged;
}

int cmd_manybody(const Globals& g, const fs::path& path, std::optional<double> hbar) {
  const RunConfig cfg = load_run_config(path);
  const ModelSpec model = cfg.model.instantiate(hbar.value_or(cfg.model.hbar), cfg.resolution);
  require_valid(model);
  const int modes = cfg.manybody.modes;
  json by_modes = json::array();
  for (int m = 1; m <= modes; ++m) {
    const ModeBasis basis = project_modes(model, m);
    by_modes.push_back({{"modes", m}, {"ground_energy", grand_canonical_ground(basis, m).ground_energy}});
  }
  const ModeBasis basis = project_modes(model, modes);
  const SectorSpectrum s = grand_canonical_ground(basis, cfg.manybody.max_particles.value_or(modes));
  const ModeHartreeFock hf = mode_hartree_fock(basis);
  const json j{{"hbar", model.hbar()},
               {"modes", modes},
               {"spectrum", s},
               {"hartree_fock", {{"energy", hf.energy}, {"particles", hf.particles}, {"iterations", hf.iterations},
                                 {"converged", hf.converged}}},
               {"ordering_gap", hf.energy - s.ground_energy},
               {"by_modes", by_modes}};
  if (g.out) open_in(g, "manybody.json") << j.dump(2) << '\n';
  print_json(j);
  return hf.converged ? Exit::ok : Exit::not_converged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weyllab: semiclassical Hartree-Fock, Thomas-Fermi and Weyl-law experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string out;
  app.add_option("--out", out, "output directory");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--plot", g.plot, "write SVG plots of sweep columns");
  app.add_option("--seed", g.seed, "seed for randomized checks");
  app.add_option("--threads", g.threads, "sweep worker threads")->check(CLI::PositiveNumber);

  fs::path config;
  std::optional<double> hbar;
  bool reduced = false;
  int trials = 0;

  auto* validate = app.add_subcommand("validate", "check a model config");
  validate->add_option("config", config)->required();
  auto* tf = app.add_subcommand("tf", "Thomas-Fermi with both solvers");
  tf->add_option("config", config)->required();
  tf->add_option("--trials", trials, "randomized bathtub rearrangements (uses --seed)")->check(CLI::NonNegativeNumber);
  auto* scf = app.add_subcommand("scf", "Hartree-Fock SCF at one hbar");
  scf->add_option("config", config)->required();
  scf->add_option("--hbar", hbar)->check(CLI::PositiveNumber);
  scf->add_flag("--reduced", reduced, "drop the exchange term (rHF)");
  auto* sweep = app.add_subcommand("sweep", "run a sweep plan");
  sweep->add_option("plan", config)->required();
  auto* heat = app.add_subcommand("heat", "heat-kernel diagonal against e^{-W}");
  heat->add_option("config", config)->required();
  auto* husimi = app.add_subcommand("husimi", "Husimi transform of the SCF minimizer");
  husimi->add_option("config", config)->required();
  husimi->add_option("--hbar", hbar)->check(CLI::PositiveNumber);
  husimi->add_flag("--reduced", reduced, "use the rHF minimizer");
  auto* manybody = app.add_subcommand("manybody", "Fock-space exact diagonalization");
  manybody->add_option("config", config)->required();
  manybody->add_option("--hbar", hbar)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return Exit::config_invalid;
  }
  if (!out.empty()) g.out = fs::path(out);

  try {
    if (*validate) return cmd_validate(g, config);
    if (*tf) return cmd_tf(g, config, trials);
    if (*scf) return cmd_scf(g, config, hbar, reduced);
    if (*sweep) return cmd_sweep(g, config);
    if (*heat) return cmd_heat(g, config);
    if (*husimi) return cmd_husimi(g, config, hbar, reduced);
    if (*manybody) return cmd_manybody(g, config, hbar);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::config_invalid;
  } catch (const GridMismatch& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::config_invalid;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::config_invalid;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << '\n';
    return Exit::not_converged;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return Exit::invariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return Exit::invariant;
  }
  return Exit::ok;
}
