#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "random_states.hpp"
#include "weyl/energies.hpp"
#include "weyl/scf.hpp"
#include "weyl/spectral.hpp"

namespace weyl::testing {

namespace {

void record(PropertyOutcome& out, double defect) {
  ++out.cases;
  out.worst = std::max(out.worst, defect);
  if (!(defect <= out.tolerance)) ++out.failures;
}

double component_scale(const EnergyBreakdown& e) {
  return std::max(std::abs(e.kinetic) + std::abs(e.potential) + std::abs(e.direct) + std::abs(e.exchange), 1e-300);
}

std::pair<double, double> spectrum_range(const Eigen::MatrixXd& g) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

double admissibility_defect(const Eigen::MatrixXd& g) {
  const auto [lo, hi] = spectrum_range(g);
  return std::max({0.0, -lo, hi - 1.0});
}

}  // namespace

PropertyOutcome quadratic_expansion_property(std::uint64_t seed, int cases) {
  PropertyOutcome out{"quadratic expansion identity", 0, 0, 0.0, 1e-9};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const ModelOperators ops(random_small_model(rng));
    const auto n = static_cast<Eigen::Index>(ops.grid().size());
    const bool exchange = c % 2 == 0;
    const DensityMatrix gamma(ops.grid(), random_admissible(n, rng));
    const Eigen::MatrixXd target = random_admissible(n, rng);
    const double t = uniform(rng, 0.0, 1.0);
    const StepQuadratic q = step_quadratic(ops, gamma, target, exchange);
    const DensityMatrix moved(ops.grid(), gamma.matrix() + t * (target - gamma.matrix()));
    const EnergyBreakdown direct = hf_energy(ops, moved, exchange);
    record(out, std::abs(direct.total - q.at(t)) / component_scale(direct));
  }
  return out;
}

PropertyOutcome exchange_below_direct_property(std::uint64_t seed, int cases) {
  PropertyOutcome out{"Ex <= D for w >= 0", 0, 0, 0.0, 1e-12};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const ModelSpec model = random_small_model(rng);
    const KernelTable kernel(model.grid(), model.interaction());
    const auto n = static_cast<Eigen::Index>(model.grid().size());
    const DensityMatrix gamma(model.grid(), random_admissible(n, rng));
    const double ex = exchange_term(kernel, gamma.matrix());
    const double d = direct_term(kernel, gamma.density(), gamma.density());
    // Relative excess of Ex over D; nonpositive when the inequality holds.
    record(out, std::max(0.0, (ex - d) / std::max(d, 1e-300)));
  }
  return out;
}

PropertyOutcome projector_idempotence_property(std::uint64_t seed, int cases) {
  PropertyOutcome out{"projector idempotence", 0, 0, 0.0, 1e-10};
  Rng rng(seed);
  std::normal_distribution<double> normal;
  for (int c = 0; c < cases; ++c) {
    const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(4, 40)(rng));
    const Grid grid(1, 1.0, n);
    const auto m = static_cast<Eigen::Index>(n);
    OperatorMatrix h = OperatorMatrix::tridiagonal(grid, Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m - 1));
    if (c % 2 == 0) {
      Eigen::VectorXd d(m), e(m - 1);
      for (Eigen::Index i = 0; i < m; ++i) d[i] = normal(rng);
      for (Eigen::Index i = 0; i + 1 < m; ++i) e[i] = normal(rng);
      h = OperatorMatrix::tridiagonal(grid, d, e);
    } else {
      Eigen::MatrixXd a(m, m);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = normal(rng);
      h = OperatorMatrix::dense(grid, 0.5 * (a + a.transpose()));
    }
    const SpectralProjector p = spectral_projector(h, 0.0, ProjectorMode::strict);
    const Eigen::MatrixXd pm = p.matrix().matrix();
    const double idem = (pm * pm - pm).norm();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.to_dense(), Eigen::EigenvaluesOnly);
    const double zt = default_zero_tol(h);
    const auto negatives = (eig.eigenvalues().array() < -zt).count();
    const double trace_defect = std::abs(pm.trace() - static_cast<double>(negatives));
    record(out, std::max(idem, trace_defect));
  }
  return out;
}

PropertyOutcome mixing_admissibility_property(std::uint64_t seed, int cases) {
  PropertyOutcome out{"admissibility under mixing", 0, 0, 0.0, 1e-10};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const auto n = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(3, 30)(rng));
    const Eigen::MatrixXd gamma = random_admissible(n, rng);
    double defect = 0.0;
    if (c % 2 == 0) {
      const Eigen::MatrixXd pi = random_admissible(n, rng);
      const double t = uniform(rng, 0.0, 1.0);
      defect = admissibility_defect(gamma + t * (pi - gamma));
    } else {
      // Gamma + t (P - Gamma) + s u u^T with 0 <= s <= t <= 1, u orthogonal to range P.
      const Eigen::MatrixXd q = random_orthogonal(n, rng);
      const auto k = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
      const Eigen::MatrixXd p = q.leftCols(k) * q.leftCols(k).transpose();
      const Eigen::VectorXd u = q.col(k);
      const double t = uniform(rng, 0.0, 1.0);
      const double s = uniform(rng, 0.0, t);
      defect = admissibility_defect(gamma + t * (p - gamma) + s * u * u.transpose());
    }
    record(out, defect);
  }
  return out;
}

PropertyOutcome determinism_property(std::uint64_t seed, int cases) {
  PropertyOutcome out{"determinism of outputs", 0, 0, 0.0, 0.0};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const ModelSpec model = random_small_model(rng);
    ScfConfig cfg;
    cfg.include_exchange = c % 2 == 0;
    cfg.max_iters = 200;
    auto render = [&] {
      const ScfResult r = scf_solve(model, cfg);
      std::ostringstream s;
      s << nlohmann::json(r.report).dump() << '\n';
      r.report.write_trajectory_csv(s);
      return s.str();
    };
    record(out, render() == render() ? 0.0 : 1.0);
  }
  return out;
}

}  // namespace weyl::testing
