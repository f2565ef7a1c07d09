#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "weyl/operator_matrix.hpp"

namespace weyl {

/// Eigen-decomposition of an OperatorMatrix, possibly partial.
///
/// All eigenvalues are always present (ascending). Eigenvectors are stored
/// for the contiguous index window [first, first + eigenvectors.cols()).
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::Index first = 0;

  bool complete() const noexcept { return first == 0 && eigenvectors.cols() == eigenvalues.size(); }
  /// min_k |lambda_k - threshold|
  double gap_to(double threshold) const;
  /// Number of eigenvalues strictly below the value.
  Eigen::Index count_below(double value) const;
  /// ||H - U diag(lambda) U^T||_F; requires complete().
  double reconstruction_residual(const OperatorMatrix& h) const;
  /// One eigenvalue per line, full precision.
  std::string eigenvalue_listing() const;
};

/// Symmetric eigensolver that reduces H to tridiagonal form once and then
/// serves eigenvalues and any window of eigenvectors on demand.
class SymmetricEigensolver {
 public:
  explicit SymmetricEigensolver(const OperatorMatrix& h);

  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  /// Eigenvectors with (0-based) indices first .. first + count - 1.
  Eigen::MatrixXd eigenvectors(Eigen::Index first, Eigen::Index count) const;
  SpectralData spectral_data(Eigen::Index first, Eigen::Index count) const;

 private:
  Eigen::Index n_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd off_;
  // Householder reflectors from the dense reduction; empty for tridiagonal input.
  Eigen::MatrixXd reflectors_;
  Eigen::VectorXd tau_;
  Eigen::VectorXd eigenvalues_;
};

/// Full eigendecomposition.
SpectralData eigensolve(const OperatorMatrix& h);
/// Eigenvectors for every eigenvalue below `value`, plus `extra` more above it.
SpectralData eigensolve_below(const OperatorMatrix& h, double value, Eigen::Index extra = 0);

enum class ProjectorMode { strict, closed };

/// Default zero tolerance 1e-9 ||H||_F.
double default_zero_tol(const OperatorMatrix& h);

/// Spectral projector 1{H < threshold} (strict) or 1{H <= threshold} (closed),
/// kept in factored form Gamma = U U^T so large grids never need a dense Gamma.
struct SpectralProjector {
  Grid grid;
  Eigen::MatrixXd occupied;           // orthonormal columns
  Eigen::VectorXd occupied_energies;  // matching eigenvalues
  /// Eigenvalues within zero_tol of the threshold: the undecided Fermi-level sector.
  Eigen::Index degeneracy = 0;
  double gap = 0.0;  // min |lambda_k - threshold|

  double trace() const noexcept { return static_cast<double>(occupied.cols()); }
  /// rho(x_i) = sum_k u_k(i)^2 / dx^d
  Field density() const;
  DensityMatrix matrix() const;
};

SpectralProjector spectral_projector(const OperatorMatrix& h, double threshold, ProjectorMode mode, double zero_tol);
SpectralProjector spectral_projector(const OperatorMatrix& h, double threshold, ProjectorMode mode = ProjectorMode::strict);

/// e^{-tH}(x_i, x_i) = sum_k e^{-t lambda_k} u_k(i)^2 / dx^d.
/// Throws when an eigenvalue lies below -700 / t (overflow guard).
double heat_diag(const SpectralData& spectrum, const Grid& grid, double t, std::size_t node);
double heat_diag(const OperatorMatrix& h, double t, std::size_t node);

}  // namespace weyl
