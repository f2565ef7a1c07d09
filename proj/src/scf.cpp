#include "weyl/scf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "weyl/errors.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

void ScfConfig::validate() const {
  if (max_iters < 1) throw ConfigError("scf.max_iters must be at least 1");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw ConfigError("scf.mixing must lie in (0, 1]");
  if (!(tol_energy > 0.0) || !(tol_state > 0.0)) throw ConfigError("scf tolerances must be positive");
  if (zero_tol && !(*zero_tol > 0.0)) throw ConfigError("scf.zero_tol must be positive");
  if (initial_state == InitialState::supplied && !supplied_state)
    throw ConfigError("initial_state 'supplied' needs a supplied matrix");
}

void ScfReport::write_trajectory_csv(std::ostream& out) const {
  out << "iter,energy,state_change,step\n" << std::setprecision(17);
  for (std::size_t k = 0; k < energies.size(); ++k) {
    out << k << ',' << energies[k] << ',';
    if (k > 0) out << state_changes[k - 1] << ',' << steps[k - 1];
    else out << ',';
    out << '\n';
  }
}

void to_json(nlohmann::json& j, const ScfReport& r) {
  j = nlohmann::json{{"iterations", r.iterations},
                     {"energies", r.energies},
                     {"final_energy", r.final_energy},
                     {"residual", r.residual},
                     {"off_shell_residual", r.off_shell_residual},
                     {"degeneracy", r.degeneracy},
                     {"fermi_gap", r.fermi_gap},
                     {"zero_tol", r.zero_tol},
                     {"scaled_trace", r.scaled_trace},
                     {"converged", r.converged},
                     {"diverged", r.diverged},
                     {"message", r.message}};
}

void to_json(nlohmann::json& j, const MinimizerCertificate& c) {
  j = nlohmann::json{{"projector_residual", c.projector_residual},
                     {"el_residual", c.el_residual},
                     {"full_residual", c.full_residual},
                     {"fermi_gap", c.fermi_gap},
                     {"shell_dimension", c.shell_dimension},
                     {"zero_tol", c.zero_tol}};
}

namespace {

Eigen::MatrixXd outer(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(u.rows(), u.rows());
  if (u.cols() == 0) return p;
  p.selfadjointView<Eigen::Lower>().rankUpdate(u);
  p.triangularView<Eigen::StrictlyUpper>() = p.transpose();
  return p;
}

// sum_ij X_ij Y_ij w(x_i - x_j)
double kernel_inner(const KernelTable& kernel, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index n = x.rows();
  double sum = 0.0;
  if (kernel.grid().dim() == 1) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) sum += x(i, j) * y(i, j) * kernel.at(i - j);
    return sum;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      sum += x(i, j) * y(i, j) * kernel.between(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return sum;
}

struct Residuals {
  double full = 0.0;
  double off_shell = 0.0;
  double gap = 0.0;
  Eigen::Index shell = 0;
};

Residuals projector_residuals(const OperatorMatrix& h, const Eigen::MatrixXd& gamma, double zero_tol) {
  const SymmetricEigensolver solver(h);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double* begin = ev.data();
  const double* end = begin + ev.size();
  const Eigen::Index lo = std::lower_bound(begin, end, -zero_tol) - begin;
  const Eigen::Index hi = std::upper_bound(begin, end, zero_tol) - begin;
  const Eigen::MatrixXd u = solver.eigenvectors(0, hi);

  Residuals r;
  r.shell = hi - lo;
  r.gap = ev.cwiseAbs().minCoeff();
  Eigen::MatrixXd diff = gamma - outer(u.leftCols(lo));
  r.full = diff.norm();
  if (r.shell == 0) {
    r.off_shell = r.full;
  } else {
    const Eigen::MatrixXd s = u.rightCols(r.shell);
    const Eigen::MatrixXd block = s.transpose() * diff * s;
    diff -= s * block * s.transpose();
    r.off_shell = diff.norm();
  }
  return r;
}

struct Candidate {
  double t = 0.0;
  double s = 0.0;
  double value = 0.0;
};

// Minimizes F(t, s) = bt t + bs s + (att t^2 + 2 ats t s + ass s^2) / 2 over 0 <= s <= t <= 1.
Candidate minimize_on_triangle(double bt, double bs, double att, double ats, double ass) {
  auto f = [&](double t, double s) { return bt * t + bs * s + 0.5 * (att * t * t + 2.0 * ats * t * s + ass * s * s); };
  Candidate best{0.0, 0.0, 0.0};
  auto consider = [&](double t, double s) {
    t = std::clamp(t, 0.0, 1.0);
    s = std::clamp(s, 0.0, t);
    const double v = f(t, s);
    if (v < best.value) best = {t, s, v};
  };
  consider(1.0, 0.0);
  consider(1.0, 1.0);
  // Edges, parametrized by r in [0, 1] with (t, s) = origin + r * direction.
  auto edge = [&](double t0, double s0, double dt, double ds) {
    const double slope = bt * dt + bs * ds + att * t0 * dt + ats * (t0 * ds + s0 * dt) + ass * s0 * ds;
    const double curv = att * dt * dt + 2.0 * ats * dt * ds + ass * ds * ds;
    if (curv > 0.0) {
      const double r = std::clamp(-slope / curv, 0.0, 1.0);
      consider(t0 + r * dt, s0 + r * ds);
    }
  };
  edge(0.0, 0.0, 1.0, 0.0);
  edge(0.0, 0.0, 1.0, 1.0);
  edge(1.0, 0.0, 0.0, 1.0);
  const double det = att * ass - ats * ats;
  if (att > 0.0 && det > 0.0) {
    const double t = (-bt * ass + bs * ats) / det;
    const double s = (-bs * att + bt * ats) / det;
    if (t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= t) consider(t, s);
  }
  return best;
}

}  // namespace

double StepQuadratic::best_step() const noexcept {
  if (curvature <= 0.0) return slope < 0.0 ? 1.0 : 0.0;
  return std::clamp(-slope / curvature, 0.0, 1.0);
}

double interaction_form(const ModelOperators& ops, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                        bool include_exchange) {
  if (ops.model().non_interacting()) return 0.0;
  const double w = ops.grid().weight();
  const Field rx = x.diagonal() / w;
  const Field ry = y.diagonal() / w;
  double q = ops.kernel().quadratic_form(rx, ry);
  if (include_exchange) q -= kernel_inner(ops.kernel(), x, y);
  return q;
}

StepQuadratic step_quadratic(const ModelOperators& ops, const DensityMatrix& gamma, const Eigen::MatrixXd& target,
                             bool include_exchange) {
  const ModelSpec& m = ops.model();
  const double hd = m.hbar_d();
  const Eigen::MatrixXd delta = target - gamma.matrix();
  const OperatorMatrix h = mean_field_operator(ops, gamma, include_exchange);
  StepQuadratic q;
  q.energy = hf_energy(ops, gamma, include_exchange).total;
  q.slope = hd * h.trace_product(delta);
  q.curvature = m.coupling() * hd * hd * interaction_form(ops, delta, delta, include_exchange);
  return q;
}

double optimal_step(const ModelSpec& model, const DensityMatrix& gamma, const DensityMatrix& pi,
                    bool include_exchange) {
  if (gamma.grid() != pi.grid()) throw GridMismatch();
  return step_quadratic(ModelOperators(model), gamma, pi.matrix(), include_exchange).best_step();
}

ScfResult scf_solve(const ModelSpec& model, const ScfConfig& cfg) { return scf_solve(ModelOperators(model), cfg); }

ScfResult scf_solve(const ModelOperators& ops, const ScfConfig& cfg) {
  cfg.validate();
  const ModelSpec& m = ops.model();
  const Grid& grid = ops.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double hd = m.hbar_d();
  const double coupling_scale = m.coupling() * hd * hd;
  const bool exchange = cfg.include_exchange;
  auto zero_tol_for = [&](const OperatorMatrix& h) { return cfg.zero_tol ? *cfg.zero_tol : default_zero_tol(h); };

  DensityMatrix gamma = DensityMatrix::zeros(grid);
  switch (cfg.initial_state) {
    case InitialState::zero:
      break;
    case InitialState::aufbau: {
      const OperatorMatrix& h0 = ops.one_body();
      gamma.mutable_matrix() = outer(spectral_projector(h0, 0.0, ProjectorMode::strict, zero_tol_for(h0)).occupied);
      break;
    }
    case InitialState::supplied:
      gamma = DensityMatrix(grid, *cfg.supplied_state);
      break;
  }

  ScfReport report;
  double energy = hf_energy(ops, gamma, exchange).total;
  report.energies.push_back(energy);
  std::optional<DensityMatrix> best;
  double best_energy = energy;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const OperatorMatrix h = mean_field_operator(ops, gamma, exchange);
    const double zt = zero_tol_for(h);
    const SymmetricEigensolver solver(h);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    const double* ev_begin = ev.data();
    const double* ev_end = ev_begin + n;

    double t = 0.0;
    double s = 0.0;
    Eigen::MatrixXd step;
    if (cfg.line_search == LineSearch::fixed || !cfg.fermi_shell_search) {
      const Eigen::Index count = std::lower_bound(ev_begin, ev_end, -zt) - ev_begin;
      step = outer(solver.eigenvectors(0, count));
      step -= gamma.matrix();
      if (cfg.line_search == LineSearch::fixed) {
        t = cfg.mixing;
      } else {
        StepQuadratic q;
        q.slope = hd * (ev.head(count).sum() - h.trace_product(gamma.matrix()));
        q.curvature = coupling_scale * interaction_form(ops, step, step, exchange);
        t = q.best_step();
      }
      step *= t;
    } else {
      // Base projector plus the eigenvector u closest to the Fermi level, whose
      // occupation s is searched jointly with the damping t.
      const Eigen::Index below = std::lower_bound(ev_begin, ev_end, 0.0) - ev_begin;
      Eigen::Index shell = below;
      if (below == n || (below > 0 && std::abs(ev[below - 1]) < std::abs(ev[below]))) shell = below - 1;
      if (shell < 0) shell = 0;
      const Eigen::MatrixXd vecs = solver.eigenvectors(0, shell + 1);
      Eigen::MatrixXd delta = outer(vecs.leftCols(shell));
      delta -= gamma.matrix();
      const Eigen::MatrixXd uu = outer(vecs.col(shell));
      const double bt = hd * (ev.head(shell).sum() - h.trace_product(gamma.matrix()));
      const double bs = hd * ev[shell];
      const double att = coupling_scale * interaction_form(ops, delta, delta, exchange);
      const double ats = coupling_scale * interaction_form(ops, delta, uu, exchange);
      const double ass = coupling_scale * interaction_form(ops, uu, uu, exchange);
      const Candidate c = minimize_on_triangle(bt, bs, att, ats, ass);
      t = c.t;
      s = c.s;
      step = t * delta + s * uu;
    }

    const double change = step.norm();
    gamma.mutable_matrix() += step;
    // Keep exact symmetry; the update is symmetric up to rounding.
    gamma.mutable_matrix() = 0.5 * (gamma.matrix() + gamma.matrix().transpose()).eval();
    const double next = hf_energy(ops, gamma, exchange).total;
    report.energies.push_back(next);
    report.state_changes.push_back(change);
    report.steps.push_back(t);
    report.iterations = iter;

    if (cfg.check_admissibility && !gamma.admissible(1e-9))
      throw InvariantError("SCF iterate left the admissible set 0 <= Gamma <= 1");
    if (cfg.line_search == LineSearch::optimal_damping && next > energy + 1e-10 * std::max(1.0, std::abs(energy)))
      throw InvariantError("optimal damping increased the energy");
    // Fixed mixing is not monotone; remember the lowest-energy iterate.
    if (cfg.line_search == LineSearch::fixed && next < best_energy) {
      best_energy = next;
      best = gamma;
    }
    if (cfg.energy_floor && next < *cfg.energy_floor) {
      report.diverged = true;
      report.message = "energy fell below the configured floor; the functional is likely unbounded below";
      energy = next;
      break;
    }
    const bool small = std::abs(next - energy) < cfg.tol_energy && change < cfg.tol_state;
    energy = next;
    if (small) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged && !report.diverged) report.message = "maximum number of iterations reached";
  if (best && !report.converged && best_energy < energy) gamma = *best;

  const OperatorMatrix h = mean_field_operator(ops, gamma, exchange);
  const double zt = zero_tol_for(h);
  const Residuals r = projector_residuals(h, gamma.matrix(), zt);
  report.final_energy = hf_energy(ops, gamma, exchange);
  report.residual = r.full;
  report.off_shell_residual = r.off_shell;
  report.degeneracy = r.shell;
  report.fermi_gap = r.gap;
  report.zero_tol = zt;
  report.scaled_trace = hd * gamma.trace();
  return {std::move(gamma), std::move(report)};
}

MinimizerCertificate minimizer_certificate(const ModelOperators& ops, const DensityMatrix& gamma,
                                           bool include_exchange, std::optional<double> zero_tol) {
  const OperatorMatrix h = mean_field_operator(ops, gamma, include_exchange);
  MinimizerCertificate c;
  c.zero_tol = zero_tol ? *zero_tol : default_zero_tol(h);
  const Residuals r = projector_residuals(h, gamma.matrix(), c.zero_tol);
  c.projector_residual = (gamma.matrix() * gamma.matrix() - gamma.matrix()).norm();
  c.el_residual = r.off_shell;
  c.full_residual = r.full;
  c.fermi_gap = r.gap;
  c.shell_dimension = r.shell;
  return c;
}

MinimizerCertificate minimizer_certificate(const ModelSpec& model, const DensityMatrix& gamma, bool include_exchange) {
  return minimizer_certificate(ModelOperators(model), gamma, include_exchange);
}

double trace_bound_value(const ModelOperators& ops, const DensityMatrix& gamma) {
  const Eigen::MatrixXd& g = gamma.matrix();
  const double kinetic = ops.kinetic().trace_product(g);
  const double potential = ops.model().potential_field().dot(g.diagonal());
  return ops.model().hbar_d() * (kinetic + potential + g.trace());
}

}  // namespace weyl
