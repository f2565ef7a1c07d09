#include "weyl/energies.hpp"

#include <cmath>
#include <numbers>

#include "weyl/errors.hpp"

namespace weyl {

void to_json(nlohmann::json& j, const EnergyBreakdown& e) {
  j = nlohmann::json{{"kinetic", e.kinetic},
                     {"potential", e.potential},
                     {"direct", e.direct},
                     {"exchange", e.exchange},
                     {"total", e.total}};
}

void from_json(const nlohmann::json& j, EnergyBreakdown& e) {
  j.at("kinetic").get_to(e.kinetic);
  j.at("potential").get_to(e.potential);
  j.at("direct").get_to(e.direct);
  j.at("exchange").get_to(e.exchange);
  j.at("total").get_to(e.total);
}

TfConstants TfConstants::for_dim(int dim) {
  TfConstants c;
  c.dim = dim;
  if (dim == 1) {
    c.ball_volume = 2.0;
  } else if (dim == 2) {
    c.ball_volume = std::numbers::pi;
  } else {
    throw ConfigError("Thomas-Fermi constants are defined for d = 1, 2 only");
  }
  c.c_tf = 4.0 * std::numbers::pi * std::numbers::pi / std::pow(c.ball_volume, 2.0 / dim);
  return c;
}

double direct_term(const Density& a, const Density& b, const InteractionSpec& w) {
  if (a.grid() != b.grid()) throw GridMismatch();
  return direct_term(KernelTable(a.grid(), w), a.values(), b.values());
}

double direct_term(const KernelTable& kernel, const Field& a, const Field& b) {
  return kernel.quadratic_form(a, b);
}

double exchange_term(const DensityMatrix& gamma, const InteractionSpec& w) {
  return exchange_term(KernelTable(gamma.grid(), w), gamma.matrix());
}

double exchange_term(const KernelTable& kernel, const Eigen::MatrixXd& gamma) {
  const auto n = static_cast<Eigen::Index>(kernel.grid().size());
  if (gamma.rows() != n || gamma.cols() != n) throw GridMismatch();
  if (kernel.is_zero()) return 0.0;
  double sum = 0.0;
  if (kernel.grid().dim() == 1) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double col = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) col += gamma(i, j) * gamma(i, j) * kernel.at(i - j);
      sum += col;
    }
    return sum;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      sum += gamma(i, j) * gamma(i, j) * kernel.between(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return sum;
}

EnergyBreakdown hf_energy(const ModelOperators& ops, const DensityMatrix& gamma, bool include_exchange) {
  if (gamma.grid() != ops.grid()) throw GridMismatch();
  const ModelSpec& m = ops.model();
  const double hd = m.hbar_d();
  EnergyBreakdown e;
  e.kinetic = hd * ops.kinetic().trace_product(gamma.matrix());
  e.potential = hd * ops.shifted_potential().dot(gamma.matrix().diagonal());
  if (!m.non_interacting()) {
    const double scale = 0.5 * m.coupling() * hd * hd;
    const Field rho = gamma.density();
    e.direct = scale * direct_term(ops.kernel(), rho, rho);
    if (include_exchange) e.exchange = scale * exchange_term(ops.kernel(), gamma.matrix());
  }
  e.finalize();
  return e;
}

EnergyBreakdown hf_energy(const ModelSpec& model, const DensityMatrix& gamma, bool include_exchange) {
  return hf_energy(ModelOperators(model), gamma, include_exchange);
}

EnergyBreakdown hf_energy(const ModelOperators& ops, const SpectralProjector& projector, bool include_exchange) {
  if (projector.grid != ops.grid()) throw GridMismatch();
  const ModelSpec& m = ops.model();
  const double hd = m.hbar_d();
  EnergyBreakdown e;
  double kin = 0.0;
  for (Eigen::Index k = 0; k < projector.occupied.cols(); ++k)
    kin += ops.kinetic().expectation(projector.occupied.col(k));
  e.kinetic = hd * kin;
  const Field diag = projector.occupied.rowwise().squaredNorm();
  e.potential = hd * ops.shifted_potential().dot(diag);
  if (!m.non_interacting()) {
    const double scale = 0.5 * m.coupling() * hd * hd;
    const Field rho = diag / ops.grid().weight();
    e.direct = scale * direct_term(ops.kernel(), rho, rho);
    if (include_exchange) e.exchange = scale * exchange_term(ops.kernel(), projector.matrix().matrix());
  }
  e.finalize();
  return e;
}

EnergyBreakdown tf_energy(const ModelSpec& model, const Density& rho) {
  if (rho.grid() != model.grid()) throw GridMismatch();
  return tf_energy(ModelOperators(model), rho.values());
}

EnergyBreakdown tf_energy(const ModelOperators& ops, const Field& rho) {
  const ModelSpec& m = ops.model();
  const Grid& grid = ops.grid();
  if (static_cast<std::size_t>(rho.size()) != grid.size()) throw GridMismatch();
  const Density checked(grid, rho);
  const Field& r = checked.values();
  const int d = m.dim();
  const TfConstants tf = TfConstants::for_dim(d);
  EnergyBreakdown e;
  e.kinetic = static_cast<double>(d) / (d + 2.0) * tf.c_tf * integrate(grid, r.array().pow(1.0 + 2.0 / d).matrix());
  e.potential = integrate(grid, ops.shifted_potential().cwiseProduct(r));
  if (!m.non_interacting()) e.direct = 0.5 * m.coupling() * direct_term(ops.kernel(), r, r);
  e.finalize();
  return e;
}

Field phase_space_density(const HusimiField& m) {
  const PhaseGrid& pg = m.phase();
  const double norm = pg.momentum_weight() / std::pow(2.0 * std::numbers::pi, pg.dim());
  return m.values().rowwise().sum() * norm;
}

EnergyBreakdown vlasov_energy(const ModelSpec& model, const HusimiField& m) {
  const PhaseGrid& pg = m.phase();
  if (pg.spatial() != model.grid()) throw GridMismatch();
  const Grid& grid = model.grid();
  const double norm = pg.momentum_weight() / std::pow(2.0 * std::numbers::pi, pg.dim());
  Eigen::VectorXd xi2(static_cast<Eigen::Index>(pg.momentum_size()));
  for (std::size_t k = 0; k < pg.momentum_size(); ++k) xi2[static_cast<Eigen::Index>(k)] = pg.momentum_norm2(k);

  const Field rho = phase_space_density(m);
  const Field shifted = model.potential_field().array() - model.chemical_potential();
  EnergyBreakdown e;
  e.kinetic = (m.values() * xi2).sum() * norm * grid.weight();
  e.potential = integrate(grid, shifted.cwiseProduct(rho));
  if (!model.non_interacting())
    e.direct = 0.5 * model.coupling() * direct_term(KernelTable(grid, model.interaction()), rho, rho);
  e.finalize();
  return e;
}

double coercivity_constant(const ModelSpec& model) {
  const OperatorMatrix a = schrodinger(model).scaled(0.75).plus_diagonal(Field::Constant(
      static_cast<Eigen::Index>(model.grid().size()), -0.25));
  const SymmetricEigensolver solver(a);
  double negative = 0.0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size() && solver.eigenvalues()[k] < 0.0; ++k)
    negative += solver.eigenvalues()[k];
  return -model.hbar_d() * negative;
}

CoercivityDiagnostic coercivity_check(const ModelOperators& ops, const DensityMatrix& gamma, double constant,
                                      bool include_exchange) {
  CoercivityDiagnostic c;
  c.constant = constant;
  c.energy = hf_energy(ops, gamma, include_exchange).total;
  const double hd = ops.model().hbar_d();
  const double shifted_trace = ops.one_body().trace_product(gamma.matrix()) + gamma.trace();
  c.lower_bound = 0.25 * hd * shifted_trace - constant;
  c.margin = c.energy - c.lower_bound;
  c.holds = c.margin >= -1e-12 * std::max(1.0, std::abs(c.energy));
  return c;
}

CoercivityDiagnostic coercivity_check(const ModelSpec& model, const DensityMatrix& gamma) {
  return coercivity_check(ModelOperators(model), gamma, coercivity_constant(model));
}

}  // namespace weyl
