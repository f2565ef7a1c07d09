#include <doctest.h>

#include <random>
#include <sstream>

#include "random_states.hpp"
#include "weyl/energies.hpp"
#include "weyl/errors.hpp"
#include "weyl/scf.hpp"

using namespace weyl;
using doctest::Approx;

namespace {

ModelSpec small_interacting(double hbar = 0.25, std::size_t n = 81) {
  return ModelSpec(Grid(1, 2.5, n), hbar, PotentialSpec::harmonic(), InteractionSpec::gaussian(1.0, 1.0), 1.0);
}

}  // namespace

TEST_CASE("non-interacting SCF returns the Fermi sea of the one-body operator") {
  const ModelSpec m(Grid(1, 4.0, 401), 0.1, PotentialSpec::harmonic(), InteractionSpec::none(), 1.0);
  const ScfResult r = scf_solve(m, ScfConfig{});
  CHECK(r.report.converged);
  const SpectralData s = eigensolve(schrodinger(m));
  double sea = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) sea += std::min(0.0, s.eigenvalues[k]);
  CHECK(r.report.final_energy.total == Approx(0.1 * sea).epsilon(1e-12));
  CHECK(r.gamma.trace() == Approx(5.0));
}

TEST_CASE("optimal damping decreases the energy and ends on a certified minimizer") {
  const ModelOperators ops(small_interacting());
  for (bool exchange : {false, true}) {
    ScfConfig cfg;
    cfg.include_exchange = exchange;
    const ScfResult r = scf_solve(ops, cfg);
    CHECK(r.report.converged);
    for (std::size_t k = 1; k < r.report.energies.size(); ++k)
      CHECK(r.report.energies[k] <= r.report.energies[k - 1] + 1e-13);
    const MinimizerCertificate c = minimizer_certificate(ops, r.gamma, exchange);
    CHECK(c.el_residual < 1e-5);
    if (exchange || c.shell_dimension == 0) CHECK(c.projector_residual < 1e-8 * 81);
    CHECK(r.gamma.admissible(1e-9));
  }
}

TEST_CASE("the SCF minimum is below random admissible states") {
  std::mt19937_64 rng(17);
  const ModelOperators ops(small_interacting(0.4, 41));
  for (bool exchange : {false, true}) {
    ScfConfig cfg;
    cfg.include_exchange = exchange;
    const double e = scf_solve(ops, cfg).report.final_energy.total;
    for (int c = 0; c < 200; ++c) {
      const DensityMatrix trial(ops.grid(), testing::random_admissible(41, rng));
      CHECK(hf_energy(ops, trial, exchange).total >= e - 1e-12);
    }
  }
}

TEST_CASE("fixed mixing reaches the same minimum as optimal damping") {
  const ModelOperators ops(small_interacting(0.4, 61));
  ScfConfig oda;
  oda.include_exchange = false;
  ScfConfig fixed = oda;
  fixed.line_search = LineSearch::fixed;
  fixed.mixing = 0.2;
  fixed.max_iters = 2000;
  const double a = scf_solve(ops, oda).report.final_energy.total;
  const ScfResult b = scf_solve(ops, fixed);
  CHECK(b.report.final_energy.total >= a - 1e-12);
  CHECK(b.report.final_energy.total == Approx(a).epsilon(1e-6));
}

TEST_CASE("the step quadratic is exact and its minimizer is optimal on [0, 1]") {
  std::mt19937_64 rng(8);
  const ModelOperators ops(small_interacting(0.5, 21));
  const DensityMatrix gamma(ops.grid(), testing::random_admissible(21, rng));
  const Eigen::MatrixXd target = testing::random_admissible(21, rng);
  const StepQuadratic q = step_quadratic(ops, gamma, target, true);
  const double t = q.best_step();
  CHECK(t >= 0.0);
  CHECK(t <= 1.0);
  for (double s = 0.0; s <= 1.0; s += 0.05) CHECK(q.at(t) <= q.at(s) + 1e-14);
  const double direct = hf_energy(ops, DensityMatrix(ops.grid(), gamma.matrix() + 0.3 * (target - gamma.matrix())), true).total;
  CHECK(q.at(0.3) == Approx(direct).epsilon(1e-12));
}

TEST_CASE("divergence guard and configuration checks") {
  const ModelOperators ops(small_interacting(0.5, 21));
  ScfConfig cfg;
  cfg.energy_floor = 10.0;
  const ScfResult r = scf_solve(ops, cfg);
  CHECK(r.report.diverged);
  CHECK_FALSE(r.report.converged);

  ScfConfig bad;
  bad.mixing = 1.5;
  bad.line_search = LineSearch::fixed;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  ScfConfig none;
  none.max_iters = 0;
  CHECK_THROWS_AS(none.validate(), ConfigError);
  ScfConfig supplied;
  supplied.initial_state = InitialState::supplied;
  supplied.supplied_state = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS(scf_solve(ops, supplied));
}

TEST_CASE("trajectory CSV and trace bound") {
  const ModelOperators ops(small_interacting(0.5, 21));
  const ScfResult r = scf_solve(ops, ScfConfig{});
  std::ostringstream csv;
  r.report.write_trajectory_csv(csv);
  CHECK(csv.str().rfind("iter,energy,state_change,step\n", 0) == 0);

  const Eigen::MatrixXd& G = r.gamma.matrix();
  double expect = 0.5 * (kinetic_matrix(ops.grid(), 0.5).to_dense() * G).trace();
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    const double x = ops.grid().point(static_cast<std::size_t>(i))[0];
    expect += 0.5 * (x * x + 1.0) * G(i, i);
  }
  CHECK(trace_bound_value(ops, r.gamma) == Approx(expect).epsilon(1e-12));
}
