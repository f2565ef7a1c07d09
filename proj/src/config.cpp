#include "weyl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "weyl/errors.hpp"

namespace weyl {

namespace fs = std::filesystem;
using nlohmann::json;

double ResolutionRule::spacing(double hbar, double fermi_momentum) const {
  if (!(sqrt_hbar_cells > 0.0) || !(fermi_cells > 0.0)) throw ConfigError("resolution factors must be positive");
  return std::min(std::sqrt(hbar) / sqrt_hbar_cells, hbar / (fermi_cells * fermi_momentum));
}

std::size_t ResolutionRule::points_for(double half_width, double hbar, double fermi_momentum) const {
  if (points) return *points;
  auto n = static_cast<std::size_t>(std::ceil(2.0 * half_width / spacing(hbar, fermi_momentum))) + 1;
  if (n % 2 == 0) ++n;
  return std::max<std::size_t>(n, 3);
}

double fermi_momentum(const PotentialSpec& v, const Grid& grid, double chemical_potential) {
  const Field values = v.sample(grid);
  return std::sqrt(std::max(chemical_potential - values.minCoeff(), 1.0));
}

ModelSpec ModelTemplate::with_points(double h, std::size_t n) const {
  return ModelSpec(Grid(dim, half_width, n), h, potential, interaction, chemical_potential, coupling, validation);
}

ModelSpec ModelTemplate::instantiate(double h, const ResolutionRule& rule) const {
  if (points) return with_points(h, *points);
  const Grid probe(dim, half_width, 401);
  const double pf = fermi_momentum(potential, probe, chemical_potential);
  return with_points(h, rule.points_for(half_width, h, pf));
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("missing or invalid '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key, where);
}

Point parse_point(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.empty() || j.size() > 2) throw ConfigError(where + " entries must be numbers or [x] / [x, y]");
  Point p{0.0, 0.0};
  for (std::size_t k = 0; k < j.size(); ++k) p[k] = j[k].get<double>();
  return p;
}

fs::path resolve(const fs::path& base, const std::string& file) {
  const fs::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

PotentialSpec parse_potential(const json& j, const fs::path& base) {
  const std::string where = "potential";
  check_keys(j, where, {"kind", "k", "b", "file"});
  const auto kind = get<std::string>(j, "kind", where);
  const double k = get_or(j, "k", 1.0, where);
  if (kind == "harmonic") return PotentialSpec::harmonic(k);
  if (kind == "quartic") return PotentialSpec::quartic(k);
  if (kind == "double_well") return PotentialSpec::double_well(k, get_or(j, "b", 1.0, where));
  if (kind == "tabulated") return PotentialSpec::tabulated(Table1D::load(resolve(base, get<std::string>(j, "file", where)).string()));
  throw ConfigError("unknown potential kind '" + kind + "'");
}

InteractionSpec parse_interaction(const json& j, const fs::path& base) {
  const std::string where = "interaction";
  check_keys(j, where, {"kind", "a", "sigma", "file", "repulsivity"});
  const auto kind = get<std::string>(j, "kind", where);
  InteractionSpec w;
  if (kind == "none") {
    w = InteractionSpec::none();
  } else if (kind == "gaussian") {
    w = InteractionSpec::gaussian(get<double>(j, "a", where), get_or(j, "sigma", 1.0, where));
  } else if (kind == "exponential") {
    w = InteractionSpec::exponential(get<double>(j, "a", where), get_or(j, "sigma", 1.0, where));
  } else if (kind == "constant") {
    w = InteractionSpec::constant(get<double>(j, "a", where));
  } else if (kind == "tabulated_even") {
    w = InteractionSpec::tabulated_even(Table1D::load(resolve(base, get<std::string>(j, "file", where)).string()));
  } else {
    throw ConfigError("unknown interaction kind '" + kind + "'");
  }
  const auto mode = get_or<std::string>(j, "repulsivity", "fourier_nonneg", where);
  if (mode == "fourier_nonneg") w.repulsivity = RepulsivityMode::fourier_nonneg;
  else if (mode == "smallness_d12") w.repulsivity = RepulsivityMode::smallness_d12;
  else throw ConfigError("unknown repulsivity mode '" + mode + "'");
  return w;
}

ScfConfig parse_scf(const json& j) {
  const std::string where = "scf";
  check_keys(j, where, {"max_iters", "mixing", "line_search", "tol_energy", "tol_state", "zero_tol", "include_exchange",
                        "initial_state", "fermi_shell_search", "energy_floor", "check_admissibility"});
  ScfConfig c;
  c.max_iters = get_or(j, "max_iters", c.max_iters, where);
  c.mixing = get_or(j, "mixing", c.mixing, where);
  const auto ls = get_or<std::string>(j, "line_search", "optimal_damping", where);
  if (ls == "optimal_damping") c.line_search = LineSearch::optimal_damping;
  else if (ls == "fixed") c.line_search = LineSearch::fixed;
  else throw ConfigError("unknown scf.line_search '" + ls + "'");
  c.tol_energy = get_or(j, "tol_energy", c.tol_energy, where);
  c.tol_state = get_or(j, "tol_state", c.tol_state, where);
  if (j.contains("zero_tol") && !j.at("zero_tol").is_null()) c.zero_tol = get<double>(j, "zero_tol", where);
  c.include_exchange = get_or(j, "include_exchange", c.include_exchange, where);
  const auto init = get_or<std::string>(j, "initial_state", "aufbau", where);
  if (init == "aufbau") c.initial_state = InitialState::aufbau;
  else if (init == "zero") c.initial_state = InitialState::zero;
  else throw ConfigError("scf.initial_state must be 'aufbau' or 'zero' in a config file");
  c.fermi_shell_search = get_or(j, "fermi_shell_search", c.fermi_shell_search, where);
  if (j.contains("energy_floor") && !j.at("energy_floor").is_null())
    c.energy_floor = get<double>(j, "energy_floor", where);
  c.check_admissibility = get_or(j, "check_admissibility", c.check_admissibility, where);
  c.validate();
  return c;
}

}  // namespace

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

ModelTemplate parse_model(const json& j, const fs::path& base) {
  const std::string where = "model";
  if (!j.is_object()) throw ConfigError("model must be an object");
  ModelTemplate m;
  const json& grid = j.contains("grid") ? j.at("grid") : throw ConfigError("model needs a 'grid' section");
  check_keys(grid, "grid", {"dim", "half_width", "points"});
  m.dim = get_or(grid, "dim", 1, "grid");
  m.half_width = get<double>(grid, "half_width", "grid");
  if (grid.contains("points") && !grid.at("points").is_null()) m.points = get<std::size_t>(grid, "points", "grid");
  m.hbar = get_or(j, "hbar", m.hbar, where);
  m.chemical_potential = get<double>(j, "chemical_potential", where);
  m.coupling = get_or(j, "coupling", m.coupling, where);
  if (!(m.hbar > 0.0)) throw ConfigError("hbar must be positive");
  if (!(m.coupling >= 0.0)) throw ConfigError("coupling lambda must be nonnegative");
  if (m.dim != 1 && m.dim != 2) throw ConfigError("grid.dim must be 1 or 2");
  if (!(m.half_width > 0.0)) throw ConfigError("grid.half_width must be positive");
  if (m.points && *m.points < 3) throw ConfigError("grid.points must be at least 3");
  m.potential = parse_potential(j.at("potential"), base);
  m.interaction = j.contains("interaction") ? parse_interaction(j.at("interaction"), base) : InteractionSpec::none();
  if (j.contains("validation")) {
    const json& v = j.at("validation");
    check_keys(v, "validation", {"tol_fourier", "lieb_thirring_2d", "min_confinement_margin"});
    m.validation.tol_fourier = get_or(v, "tol_fourier", m.validation.tol_fourier, "validation");
    if (v.contains("lieb_thirring_2d") && !v.at("lieb_thirring_2d").is_null())
      m.validation.lieb_thirring_2d = get<double>(v, "lieb_thirring_2d", "validation");
    m.validation.min_confinement_margin =
        get_or(v, "min_confinement_margin", m.validation.min_confinement_margin, "validation");
  }
  return m;
}

RunConfig parse_run_config(const json& j, const fs::path& base) {
  check_keys(j, "config", {"grid", "hbar", "chemical_potential", "coupling", "potential", "interaction", "validation",
                           "resolution", "scf", "thomas_fermi", "heat", "manybody", "phase_space"});
  RunConfig c;
  c.model = parse_model(j, base);
  if (j.contains("resolution")) {
    const json& r = j.at("resolution");
    check_keys(r, "resolution", {"sqrt_hbar_cells", "fermi_cells"});
    c.resolution.sqrt_hbar_cells = get_or(r, "sqrt_hbar_cells", c.resolution.sqrt_hbar_cells, "resolution");
    c.resolution.fermi_cells = get_or(r, "fermi_cells", c.resolution.fermi_cells, "resolution");
    if (!(c.resolution.sqrt_hbar_cells > 0.0) || !(c.resolution.fermi_cells > 0.0))
      throw ConfigError("resolution factors must be positive");
  }
  c.resolution.points = c.model.points;
  if (j.contains("scf")) c.scf = parse_scf(j.at("scf"));
  if (j.contains("thomas_fermi")) {
    const json& t = j.at("thomas_fermi");
    check_keys(t, "thomas_fermi", {"points", "mixing", "tol", "max_iters", "pg_step", "pg_tol", "pg_max_iters"});
    if (t.contains("points")) c.tf_points = get<std::size_t>(t, "points", "thomas_fermi");
    c.tf_fixed_point.mixing = get_or(t, "mixing", c.tf_fixed_point.mixing, "thomas_fermi");
    c.tf_fixed_point.tol = get_or(t, "tol", c.tf_fixed_point.tol, "thomas_fermi");
    c.tf_fixed_point.max_iters = get_or(t, "max_iters", c.tf_fixed_point.max_iters, "thomas_fermi");
    c.tf_minimize.step = get_or(t, "pg_step", c.tf_minimize.step, "thomas_fermi");
    c.tf_minimize.tol = get_or(t, "pg_tol", c.tf_minimize.tol, "thomas_fermi");
    c.tf_minimize.max_iters = get_or(t, "pg_max_iters", c.tf_minimize.max_iters, "thomas_fermi");
  }
  if (j.contains("heat")) {
    const json& h = j.at("heat");
    check_keys(h, "heat", {"times", "points", "sqrt_t_cells", "sqrt_t_width"});
    if (h.contains("times")) c.heat.times = get<std::vector<double>>(h, "times", "heat");
    if (h.contains("points")) {
      c.heat.points.clear();
      for (const auto& p : h.at("points")) c.heat.points.push_back(parse_point(p, "heat.points"));
    }
    c.heat.sqrt_t_cells = get_or(h, "sqrt_t_cells", c.heat.sqrt_t_cells, "heat");
    c.heat.sqrt_t_width = get_or(h, "sqrt_t_width", c.heat.sqrt_t_width, "heat");
    if (c.heat.times.empty() || std::any_of(c.heat.times.begin(), c.heat.times.end(), [](double t) { return !(t > 0.0); }))
      throw ConfigError("heat.times must be a nonempty list of positive values");
  }
  if (j.contains("manybody")) {
    const json& mb = j.at("manybody");
    check_keys(mb, "manybody", {"modes", "max_particles"});
    c.manybody.modes = get_or(mb, "modes", c.manybody.modes, "manybody");
    if (mb.contains("max_particles")) c.manybody.max_particles = get<int>(mb, "max_particles", "manybody");
  }
  if (j.contains("phase_space")) {
    const json& ps = j.at("phase_space");
    check_keys(ps, "phase_space", {"momentum_margin", "momentum_spacing"});
    c.phase.momentum_margin = get_or(ps, "momentum_margin", c.phase.momentum_margin, "phase_space");
    c.phase.momentum_spacing = get_or(ps, "momentum_spacing", c.phase.momentum_spacing, "phase_space");
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

}  // namespace weyl
