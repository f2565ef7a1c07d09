#include "weyl/thomas_fermi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "weyl/errors.hpp"

namespace weyl {

void to_json(nlohmann::json& j, const TfSolveReport& r) {
  j = nlohmann::json{{"method", r.method},
                     {"iterations", r.iterations},
                     {"residual", r.residual},
                     {"mass", r.mass},
                     {"energy", r.energy},
                     {"kkt_residual", r.kkt_residual},
                     {"gradient_map_norm", r.gradient_map_norm},
                     {"converged", r.converged}};
}

double l1_norm(const Grid& grid, const Field& f) { return f.cwiseAbs().sum() * grid.weight(); }

namespace {

Field interaction_potential(const ModelOperators& ops, const Field& rho) {
  const ModelSpec& m = ops.model();
  if (m.non_interacting()) return Field::Zero(rho.size());
  return m.coupling() * ops.kernel().convolve(rho);
}

Field map_from_potential(const ModelOperators& ops, const Field& mean_field) {
  const int d = ops.model().dim();
  const TfConstants tf = TfConstants::for_dim(d);
  const double prefactor = tf.ball_volume / std::pow(2.0 * std::numbers::pi, d);
  const Field head = (-ops.shifted_potential() - mean_field).cwiseMax(0.0);
  if (d == 1) return prefactor * head.cwiseSqrt();
  return prefactor * head;
}

void finish_report(const ModelOperators& ops, const Field& rho, TfSolveReport& report) {
  report.residual = l1_norm(ops.grid(), rho - tf_map(ops, rho));
  report.mass = integrate(ops.grid(), rho);
  report.energy = tf_energy(ops, rho);
  report.kkt_residual = tf_kkt_residual(ops, rho);
}

}  // namespace

Field tf_map(const ModelOperators& ops, const Field& rho) {
  if (static_cast<std::size_t>(rho.size()) != ops.grid().size()) throw GridMismatch();
  return map_from_potential(ops, interaction_potential(ops, rho));
}

Density tf_map(const ModelSpec& model, const Density& rho) {
  if (rho.grid() != model.grid()) throw GridMismatch();
  return Density(model.grid(), tf_map(ModelOperators(model), rho.values()));
}

Field tf_gradient(const ModelOperators& ops, const Field& rho) {
  const int d = ops.model().dim();
  const double c = TfConstants::for_dim(d).c_tf;
  const Field kinetic = d == 1 ? Field(rho.cwiseAbs2()) : rho;
  return c * kinetic + ops.shifted_potential() + interaction_potential(ops, rho);
}

double tf_kkt_residual(const ModelOperators& ops, const Field& rho) {
  const Field g = tf_gradient(ops, rho);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    worst = std::max(worst, rho[i] > 0.0 ? std::abs(g[i]) : std::max(0.0, -g[i]));
  return worst;
}

double tf_support_violation(const ModelOperators& ops, const Field& rho) {
  const Field u = interaction_potential(ops, rho);
  const double bound = u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    if (ops.shifted_potential()[i] >= bound) worst = std::max(worst, rho[i]);
  return worst;
}

TfResult tf_fixed_point(const ModelSpec& model, const TfFixedPointConfig& cfg) {
  return tf_fixed_point(ModelOperators(model), cfg);
}

TfResult tf_fixed_point(const ModelOperators& ops, const TfFixedPointConfig& cfg) {
  if (!(cfg.mixing > 0.0 && cfg.mixing <= 1.0)) throw ConfigError("thomas_fermi.mixing must lie in (0, 1]");
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) throw ConfigError("invalid Thomas-Fermi tolerance or iteration cap");
  const Grid& grid = ops.grid();
  TfSolveReport report;
  report.method = "fixed_point";
  Field rho = tf_map(ops, Field::Zero(static_cast<Eigen::Index>(grid.size())));
  double beta = cfg.mixing;
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Field phi = tf_map(ops, rho);
    const double residual = l1_norm(grid, phi - rho);
    if (residual > previous) beta *= 0.5;
    previous = residual;
    const Field next = (1.0 - beta) * rho + beta * phi;
    const double change = beta * residual;
    const double scale = std::max(1.0, l1_norm(grid, rho));
    rho = next;
    report.iterations = iter;
    if (change < cfg.tol * scale) {
      report.converged = true;
      break;
    }
  }
  // One undamped application clears the geometric tail damping leaves outside the support.
  rho = tf_map(ops, rho);
  finish_report(ops, rho, report);
  return {Density(grid, rho), report};
}

TfResult tf_minimize(const ModelSpec& model, const TfMinimizeConfig& cfg) {
  return tf_minimize(ModelOperators(model), cfg);
}

TfResult tf_minimize(const ModelOperators& ops, const TfMinimizeConfig& cfg) {
  if (!(cfg.step > 0.0) || !(cfg.tol > 0.0) || cfg.max_iters < 1)
    throw ConfigError("invalid Thomas-Fermi minimizer settings");
  const Grid& grid = ops.grid();
  const double weight = grid.weight();
  constexpr std::size_t memory = 10;
  constexpr double armijo = 1e-4;

  TfSolveReport report;
  report.method = "projected_gradient";
  Field x = tf_map(ops, Field::Zero(static_cast<Eigen::Index>(grid.size())));
  double energy = tf_energy(ops, x).total;
  Field g = tf_gradient(ops, x);
  double alpha = cfg.step;
  std::deque<double> history{energy};

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    report.gradient_map_norm = ((x - g).cwiseMax(0.0) - x).cwiseAbs().maxCoeff();
    if (report.gradient_map_norm < cfg.tol) {
      report.converged = true;
      break;
    }
    const Field d = (x - alpha * g).cwiseMax(0.0) - x;
    const double slope = g.dot(d) * weight;
    const double reference = *std::max_element(history.begin(), history.end());
    double theta = 1.0;
    Field trial = x + d;
    double trial_energy = tf_energy(ops, trial).total;
    while (trial_energy > reference + armijo * theta * slope && theta > 1e-16) {
      theta *= 0.5;
      trial = x + theta * d;
      trial_energy = tf_energy(ops, trial).total;
    }
    const Field trial_grad = tf_gradient(ops, trial);
    const Field s = trial - x;
    const double sy = s.dot(trial_grad - g);
    alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : 1e12;
    x = trial;
    g = trial_grad;
    energy = trial_energy;
    history.push_back(energy);
    if (history.size() > memory) history.pop_front();
    report.iterations = iter;
  }
  finish_report(ops, x, report);
  return {Density(grid, x), report};
}

void write_density_text(std::ostream& out, const Density& rho) {
  const Grid& grid = rho.grid();
  out << std::setprecision(15);
  out << (grid.dim() == 1 ? "# x rho\n" : "# x y rho\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    out << p[0] << ' ';
    if (grid.dim() == 2) out << p[1] << ' ';
    out << rho[i] << '\n';
  }
}

nlohmann::json density_json(const Density& rho) {
  const Grid& grid = rho.grid();
  nlohmann::json j;
  j["dim"] = grid.dim();
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    x.push_back(p[0]);
    if (grid.dim() == 2) y.push_back(p[1]);
    values.push_back(rho[i]);
  }
  j["x"] = x;
  if (grid.dim() == 2) j["y"] = y;
  j["rho"] = values;
  return j;
}

}  // namespace weyl
