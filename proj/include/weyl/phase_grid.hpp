#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "weyl/grid.hpp"

namespace weyl {

/// Spatial grid times a uniform momentum grid [-Xi, Xi]^d.
///
/// Momentum nodes are flattened like spatial ones (row-major in 2D).
class PhaseGrid {
 public:
  PhaseGrid(Grid spatial, double momentum_half_width, std::size_t momentum_points);

  const Grid& spatial() const noexcept { return spatial_; }
  int dim() const noexcept { return spatial_.dim(); }
  double momentum_half_width() const noexcept { return xi_half_width_; }
  std::size_t momentum_points_per_axis() const noexcept { return xi_points_; }
  double momentum_spacing() const noexcept { return xi_spacing_; }
  /// Delta xi^d
  double momentum_weight() const noexcept { return xi_weight_; }
  /// n_xi^d
  std::size_t momentum_size() const noexcept { return xi_size_; }
  const std::vector<double>& momentum_axis() const noexcept { return xi_axis_; }
  Point momentum(std::size_t k) const;
  double momentum_norm2(std::size_t k) const;

  bool operator==(const PhaseGrid& other) const noexcept;

 private:
  Grid spatial_;
  double xi_half_width_;
  std::size_t xi_points_;
  double xi_spacing_;
  double xi_weight_;
  std::size_t xi_size_;
  std::vector<double> xi_axis_;
};

enum class HusimiSource { transform, bathtub, explicit_values };

/// Phase-space occupation m(x_i, xi_k); rows are spatial nodes, columns momentum nodes.
class HusimiField {
 public:
  static constexpr double occupancy_tolerance = 1e-9;

  /// Throws InvariantError unless -tol <= m <= 1 + tol everywhere.
  HusimiField(PhaseGrid phase, Eigen::MatrixXd values, HusimiSource source);

  const PhaseGrid& phase() const noexcept { return phase_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  HusimiSource source() const noexcept { return source_; }
  double max_value() const { return values_.maxCoeff(); }
  double min_value() const { return values_.minCoeff(); }

  /// Dense text matrix, one spatial node per line.
  void write_text(std::ostream& out) const;

 private:
  PhaseGrid phase_;
  Eigen::MatrixXd values_;
  HusimiSource source_;
};

}  // namespace weyl
