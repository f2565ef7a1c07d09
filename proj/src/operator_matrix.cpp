#include "weyl/operator_matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "weyl/errors.hpp"

namespace weyl {

namespace {

double asymmetry(const Eigen::MatrixXd& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

}  // namespace

DensityMatrix::DensityMatrix(Grid grid, Eigen::MatrixXd gamma) : grid_(std::move(grid)), gamma_(std::move(gamma)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (gamma_.rows() != n || gamma_.cols() != n) throw GridMismatch();
  if (asymmetry(gamma_) > 1e-12) throw InvariantError("density matrix is not symmetric");
}

DensityMatrix DensityMatrix::zeros(const Grid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return DensityMatrix(grid, Eigen::MatrixXd::Zero(n, n));
}

Field DensityMatrix::density() const { return gamma_.diagonal() / grid_.weight(); }

std::pair<double, double> DensityMatrix::occupation_range() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gamma_, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev[0], ev[ev.size() - 1]};
}

bool DensityMatrix::admissible(double tol) const {
  const auto [lo, hi] = occupation_range();
  return lo >= -tol && hi <= 1.0 + tol;
}

OperatorMatrix::OperatorMatrix(Grid grid, Eigen::VectorXd d, Eigen::VectorXd e, std::optional<Eigen::MatrixXd> dense)
    : grid_(std::move(grid)), diag_(std::move(d)), off_(std::move(e)), dense_(std::move(dense)) {}

OperatorMatrix OperatorMatrix::tridiagonal(Grid grid, Eigen::VectorXd diagonal, Eigen::VectorXd off_diagonal) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (grid.dim() != 1) throw ConfigError("tridiagonal storage is only meaningful in 1D");
  if (diagonal.size() != n || off_diagonal.size() != n - 1) throw GridMismatch();
  return OperatorMatrix(std::move(grid), std::move(diagonal), std::move(off_diagonal), std::nullopt);
}

OperatorMatrix OperatorMatrix::dense(Grid grid, Eigen::MatrixXd matrix) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (matrix.rows() != n || matrix.cols() != n) throw GridMismatch();
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if (asymmetry(matrix) > 1e-12 * scale)
    throw InvariantError("operator matrix is not symmetric");
  return OperatorMatrix(std::move(grid), {}, {}, std::move(matrix));
}

Eigen::MatrixXd OperatorMatrix::to_dense() const {
  if (dense_) return *dense_;
  const Eigen::Index n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.diagonal() = diag_;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = off_[i];
    m(i + 1, i) = off_[i];
  }
  return m;
}

Eigen::VectorXd OperatorMatrix::diagonal() const { return dense_ ? Eigen::VectorXd(dense_->diagonal()) : diag_; }

double OperatorMatrix::frobenius_norm() const {
  if (dense_) return dense_->norm();
  return std::sqrt(diag_.squaredNorm() + 2.0 * off_.squaredNorm());
}

OperatorMatrix OperatorMatrix::plus_diagonal(const Field& d) const {
  if (d.size() != size()) throw GridMismatch();
  if (dense_) {
    Eigen::MatrixXd m = *dense_;
    m.diagonal() += d;
    return OperatorMatrix(grid_, {}, {}, std::move(m));
  }
  return OperatorMatrix(grid_, diag_ + d, off_, std::nullopt);
}

OperatorMatrix OperatorMatrix::minus(const Eigen::MatrixXd& x) const {
  if (x.rows() != size() || x.cols() != size()) throw GridMismatch();
  Eigen::MatrixXd m = to_dense();
  m -= x;
  return OperatorMatrix(grid_, {}, {}, std::move(m));
}

OperatorMatrix OperatorMatrix::scaled(double s) const {
  if (dense_) return OperatorMatrix(grid_, {}, {}, Eigen::MatrixXd(s * *dense_));
  return OperatorMatrix(grid_, s * diag_, s * off_, std::nullopt);
}

double OperatorMatrix::trace_product(const Eigen::MatrixXd& g) const {
  if (g.rows() != size() || g.cols() != size()) throw GridMismatch();
  if (dense_) return dense_->cwiseProduct(g).sum();
  double t = diag_.dot(g.diagonal());
  const Eigen::Index n = size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) t += off_[i] * (g(i, i + 1) + g(i + 1, i));
  return t;
}

double OperatorMatrix::expectation(const Eigen::VectorXd& u) const {
  if (dense_) return u.dot(*dense_ * u);
  const Eigen::Index n = size();
  double t = diag_.dot(u.cwiseAbs2());
  t += 2.0 * (off_.array() * u.head(n - 1).array() * u.tail(n - 1).array()).sum();
  return t;
}

Eigen::MatrixXd OperatorMatrix::apply(const Eigen::MatrixXd& x) const {
  if (dense_) return *dense_ * x;
  const Eigen::Index n = size();
  Eigen::MatrixXd y = diag_.asDiagonal() * x;
  y.topRows(n - 1) += off_.asDiagonal() * x.bottomRows(n - 1);
  y.bottomRows(n - 1) += off_.asDiagonal() * x.topRows(n - 1);
  return y;
}

OperatorMatrix kinetic_matrix(const Grid& grid, double hbar) {
  const double c = hbar * hbar / (grid.spacing() * grid.spacing());
  const auto n = static_cast<Eigen::Index>(grid.points_per_axis());
  if (grid.dim() == 1) {
    return OperatorMatrix::tridiagonal(grid, Eigen::VectorXd::Constant(n, 2.0 * c),
                                       Eigen::VectorXd::Constant(n - 1, -c));
  }
  // Kronecker sum K (x) I + I (x) K of the 1D stencil.
  const Eigen::Index size = n * n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index ix = 0; ix < n; ++ix) {
    for (Eigen::Index iy = 0; iy < n; ++iy) {
      const Eigen::Index i = ix * n + iy;
      m(i, i) = 4.0 * c;
      if (ix > 0) m(i, i - n) = -c;
      if (ix + 1 < n) m(i, i + n) = -c;
      if (iy > 0) m(i, i - 1) = -c;
      if (iy + 1 < n) m(i, i + 1) = -c;
    }
  }
  return OperatorMatrix::dense(grid, std::move(m));
}

OperatorMatrix schrodinger(const ModelSpec& model) {
  const Field shifted = model.potential_field().array() - model.chemical_potential();
  return kinetic_matrix(model.grid(), model.hbar()).plus_diagonal(shifted);
}

ModelOperators::ModelOperators(ModelSpec model)
    : model_(std::move(model)),
      shifted_potential_(model_.potential_field().array() - model_.chemical_potential()),
      kernel_(model_.grid(), model_.interaction()) {}

const OperatorMatrix& ModelOperators::kinetic() const {
  if (!kinetic_) kinetic_ = kinetic_matrix(model_.grid(), model_.hbar());
  return *kinetic_;
}

const OperatorMatrix& ModelOperators::one_body() const {
  if (!one_body_) one_body_ = schrodinger(model_);
  return *one_body_;
}

const Eigen::MatrixXd& ModelOperators::kernel_matrix() const {
  if (!kernel_matrix_) kernel_matrix_ = kernel_.matrix();
  return *kernel_matrix_;
}

OperatorMatrix mean_field_operator(const ModelOperators& ops, const DensityMatrix& gamma, bool include_exchange) {
  if (gamma.grid() != ops.grid()) throw GridMismatch();
  const ModelSpec& m = ops.model();
  if (m.non_interacting()) return ops.one_body();
  const double scale = m.coupling() * m.hbar_d();
  const Field hartree = ops.kernel().convolve(gamma.density()) * scale;
  OperatorMatrix h = ops.one_body().plus_diagonal(hartree);
  if (!include_exchange) return h;
  return h.minus(scale * ops.kernel_matrix().cwiseProduct(gamma.matrix()));
}

OperatorMatrix mean_field_operator(const ModelSpec& model, const DensityMatrix& gamma, bool include_exchange) {
  return mean_field_operator(ModelOperators(model), gamma, include_exchange);
}

}  // namespace weyl
