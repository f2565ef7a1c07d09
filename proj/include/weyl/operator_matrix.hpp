#pragma once

#include <optional>

#include <Eigen/Core>

#include "weyl/convolution.hpp"
#include "weyl/grid.hpp"
#include "weyl/model.hpp"

namespace weyl {

/// One-body density matrix Gamma in the orthonormal node basis
/// e_i = indicator_i / dx^{d/2}.
///
/// Kernel convention: gamma(x_i, x_j) = Gamma_ij / dx^d, so that
/// rho_gamma(x_i) = Gamma_ii / dx^d and tr gamma = sum_i Gamma_ii.
class DensityMatrix {
 public:
  /// Throws if Gamma is not symmetric to 1e-12. The Pauli bound is not
  /// checked here (it costs a diagonalization); see occupation_range().
  DensityMatrix(Grid grid, Eigen::MatrixXd gamma);
  static DensityMatrix zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& matrix() const noexcept { return gamma_; }
  Eigen::MatrixXd& mutable_matrix() noexcept { return gamma_; }
  Eigen::Index size() const noexcept { return gamma_.rows(); }

  Field density() const;
  double trace() const { return gamma_.trace(); }
  /// Smallest and largest eigenvalue of Gamma.
  std::pair<double, double> occupation_range() const;
  /// 0 <= Gamma <= 1 up to tol.
  bool admissible(double tol = 1e-9) const;

 private:
  Grid grid_;
  Eigen::MatrixXd gamma_;
};

/// Real symmetric operator on grid functions (energy units).
///
/// 1D operators built from the finite-difference stencil plus diagonal terms
/// stay tridiagonal, which lets the eigensolver skip the dense reduction.
class OperatorMatrix {
 public:
  static OperatorMatrix tridiagonal(Grid grid, Eigen::VectorXd diagonal, Eigen::VectorXd off_diagonal);
  static OperatorMatrix dense(Grid grid, Eigen::MatrixXd matrix);

  const Grid& grid() const noexcept { return grid_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(grid_.size()); }
  bool is_tridiagonal() const noexcept { return !dense_.has_value(); }

  /// Tridiagonal storage; valid only when is_tridiagonal().
  const Eigen::VectorXd& tridiagonal_diagonal() const { return diag_; }
  const Eigen::VectorXd& tridiagonal_off_diagonal() const { return off_; }
  /// Dense storage; valid only when !is_tridiagonal().
  const Eigen::MatrixXd& dense_matrix() const { return *dense_; }

  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd diagonal() const;
  double frobenius_norm() const;

  OperatorMatrix plus_diagonal(const Field& d) const;
  /// H - X; always dense.
  OperatorMatrix minus(const Eigen::MatrixXd& x) const;
  OperatorMatrix scaled(double s) const;

  /// tr(H G) for symmetric G.
  double trace_product(const Eigen::MatrixXd& g) const;
  /// u^T H u
  double expectation(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

 private:
  OperatorMatrix(Grid grid, Eigen::VectorXd d, Eigen::VectorXd e, std::optional<Eigen::MatrixXd> dense);

  Grid grid_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd off_;
  std::optional<Eigen::MatrixXd> dense_;
};

/// -hbar^2 Delta, second-order central differences with Dirichlet boundaries.
OperatorMatrix kinetic_matrix(const Grid& grid, double hbar);

/// -hbar^2 Delta + V - E
OperatorMatrix schrodinger(const ModelSpec& model);

/// Shared precomputation for repeated mean-field and energy evaluations on one model.
class ModelOperators {
 public:
  explicit ModelOperators(ModelSpec model);

  const ModelSpec& model() const noexcept { return model_; }
  const Grid& grid() const noexcept { return model_.grid(); }
  /// -hbar^2 Delta + V - E
  /// Built on first use, like kernel_matrix(): a 2D grid makes these dense, and
  /// density-only callers never need them.
  const OperatorMatrix& one_body() const;
  const OperatorMatrix& kinetic() const;
  const Field& shifted_potential() const noexcept { return shifted_potential_; }
  const KernelTable& kernel() const noexcept { return kernel_; }
  /// Dense W_ij = w(x_i - x_j); built on first use.
  const Eigen::MatrixXd& kernel_matrix() const;

 private:
  ModelSpec model_;
  mutable std::optional<OperatorMatrix> kinetic_;
  mutable std::optional<OperatorMatrix> one_body_;
  Field shifted_potential_;
  KernelTable kernel_;
  mutable std::optional<Eigen::MatrixXd> kernel_matrix_;
};

/// H_gamma = (-hbar^2 Delta + V - E) + lambda hbar^d diag(w * rho_gamma) - lambda hbar^d X,
/// X_ij = w(x_i - x_j) Gamma_ij; the exchange part is dropped for reduced HF.
OperatorMatrix mean_field_operator(const ModelOperators& ops, const DensityMatrix& gamma, bool include_exchange);
OperatorMatrix mean_field_operator(const ModelSpec& model, const DensityMatrix& gamma, bool include_exchange);

}  // namespace weyl
