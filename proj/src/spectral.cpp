#include "weyl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <lapacke.h>

#include "weyl/errors.hpp"

namespace weyl {

double SpectralData::gap_to(double threshold) const {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) gap = std::min(gap, std::abs(eigenvalues[k] - threshold));
  return gap;
}

Eigen::Index SpectralData::count_below(double value) const {
  const double* begin = eigenvalues.data();
  return std::lower_bound(begin, begin + eigenvalues.size(), value) - begin;
}

double SpectralData::reconstruction_residual(const OperatorMatrix& h) const {
  if (!complete()) throw InvariantError("reconstruction residual needs the full eigenbasis");
  const Eigen::MatrixXd r = eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  return (h.to_dense() - r).norm();
}

std::string SpectralData::eigenvalue_listing() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) out << eigenvalues[k] << '\n';
  return out.str();
}

SymmetricEigensolver::SymmetricEigensolver(const OperatorMatrix& h) : n_(h.size()) {
  if (h.is_tridiagonal()) {
    diag_ = h.tridiagonal_diagonal();
    off_ = h.tridiagonal_off_diagonal();
  } else {
    reflectors_ = h.dense_matrix();
    diag_.resize(n_);
    off_.resize(std::max<Eigen::Index>(n_ - 1, 0));
    tau_.resize(std::max<Eigen::Index>(n_ - 1, 1));
    const lapack_int info = LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n_), reflectors_.data(),
                                           static_cast<lapack_int>(n_), diag_.data(), off_.data(), tau_.data());
    if (info != 0) throw ConvergenceError("dsytrd failed with info " + std::to_string(info));
  }
  eigenvalues_ = diag_;
  Eigen::VectorXd e = off_;
  const lapack_int info = LAPACKE_dsterf(static_cast<lapack_int>(n_), eigenvalues_.data(), e.data());
  if (info != 0) throw ConvergenceError("dsterf failed with info " + std::to_string(info));
}

Eigen::MatrixXd SymmetricEigensolver::eigenvectors(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 0 || first + count > n_) throw std::out_of_range("eigenvector window out of range");
  if (count == 0) return Eigen::MatrixXd(n_, 0);
  Eigen::VectorXd d = diag_;
  Eigen::VectorXd e(n_);
  e.head(n_ - 1) = off_;
  e[n_ - 1] = 0.0;
  Eigen::VectorXd w(n_);
  Eigen::MatrixXd z(n_, count);
  std::vector<lapack_int> support(static_cast<std::size_t>(2 * count));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n_), d.data(), e.data(), 0.0, 0.0,
      static_cast<lapack_int>(first + 1), static_cast<lapack_int>(first + count), 0.0, &found, w.data(), z.data(),
      static_cast<lapack_int>(n_), support.data());
  if (info != 0 || found != count) throw ConvergenceError("dstevr failed with info " + std::to_string(info));
  if (reflectors_.size() > 0) {
    const lapack_int back = LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', static_cast<lapack_int>(n_),
                                           static_cast<lapack_int>(count), reflectors_.data(),
                                           static_cast<lapack_int>(n_), tau_.data(), z.data(),
                                           static_cast<lapack_int>(n_));
    if (back != 0) throw ConvergenceError("dormtr failed with info " + std::to_string(back));
  }
  return z;
}

SpectralData SymmetricEigensolver::spectral_data(Eigen::Index first, Eigen::Index count) const {
  SpectralData s;
  s.eigenvalues = eigenvalues_;
  s.eigenvectors = eigenvectors(first, count);
  s.first = first;
  return s;
}

SpectralData eigensolve(const OperatorMatrix& h) {
  const SymmetricEigensolver solver(h);
  return solver.spectral_data(0, h.size());
}

SpectralData eigensolve_below(const OperatorMatrix& h, double value, Eigen::Index extra) {
  const SymmetricEigensolver solver(h);
  const double* ev = solver.eigenvalues().data();
  const Eigen::Index below = std::lower_bound(ev, ev + h.size(), value) - ev;
  return solver.spectral_data(0, std::min(h.size(), below + std::max<Eigen::Index>(extra, 0)));
}

double default_zero_tol(const OperatorMatrix& h) { return 1e-9 * h.frobenius_norm(); }

Field SpectralProjector::density() const {
  return occupied.rowwise().squaredNorm() / grid.weight();
}

DensityMatrix SpectralProjector::matrix() const {
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(occupied.rows(), occupied.rows());
  gamma.selfadjointView<Eigen::Lower>().rankUpdate(occupied);
  gamma.triangularView<Eigen::StrictlyUpper>() = gamma.transpose();
  return DensityMatrix(grid, std::move(gamma));
}

SpectralProjector spectral_projector(const OperatorMatrix& h, double threshold, ProjectorMode mode, double zero_tol) {
  const SymmetricEigensolver solver(h);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double* begin = ev.data();
  const double* end = begin + ev.size();
  const Eigen::Index shell_lo = std::lower_bound(begin, end, threshold - zero_tol) - begin;
  const Eigen::Index shell_hi = std::upper_bound(begin, end, threshold + zero_tol) - begin;
  const Eigen::Index count = mode == ProjectorMode::strict ? shell_lo : shell_hi;

  SpectralProjector p{h.grid(), solver.eigenvectors(0, count), ev.head(count), shell_hi - shell_lo, 0.0};
  p.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) p.gap = std::min(p.gap, std::abs(ev[k] - threshold));
  return p;
}

SpectralProjector spectral_projector(const OperatorMatrix& h, double threshold, ProjectorMode mode) {
  return spectral_projector(h, threshold, mode, default_zero_tol(h));
}

double heat_diag(const SpectralData& spectrum, const Grid& grid, double t, std::size_t node) {
  if (!(t > 0.0)) throw ConfigError("heat time must be positive");
  if (!spectrum.complete()) throw InvariantError("heat diagonal needs the full eigenbasis");
  if (node >= grid.size()) throw std::out_of_range("node index out of range");
  if (spectrum.eigenvalues.size() > 0 && spectrum.eigenvalues[0] < -700.0 / t)
    throw InvariantError("eigenvalue below -700/t would overflow the heat kernel");
  const auto row = spectrum.eigenvectors.row(static_cast<Eigen::Index>(node));
  double sum = 0.0;
  for (Eigen::Index k = 0; k < spectrum.eigenvalues.size(); ++k)
    sum += std::exp(-t * spectrum.eigenvalues[k]) * row[k] * row[k];
  return sum / grid.weight();
}

double heat_diag(const OperatorMatrix& h, double t, std::size_t node) {
  return heat_diag(eigensolve(h), h.grid(), t, node);
}

}  // namespace weyl
