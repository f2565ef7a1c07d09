#include "weyl/phase_grid.hpp"

#include <iomanip>
#include <ostream>

#include "weyl/errors.hpp"

namespace weyl {

PhaseGrid::PhaseGrid(Grid spatial, double momentum_half_width, std::size_t momentum_points)
    : spatial_(std::move(spatial)), xi_half_width_(momentum_half_width), xi_points_(momentum_points) {
  if (!(momentum_half_width > 0.0)) throw ConfigError("momentum half-width must be positive");
  if (momentum_points < 3) throw ConfigError("momentum grid needs at least 3 points per axis");
  xi_spacing_ = 2.0 * xi_half_width_ / static_cast<double>(xi_points_ - 1);
  xi_weight_ = dim() == 1 ? xi_spacing_ : xi_spacing_ * xi_spacing_;
  xi_size_ = dim() == 1 ? xi_points_ : xi_points_ * xi_points_;
  xi_axis_.resize(xi_points_);
  for (std::size_t k = 0; k < xi_points_; ++k)
    xi_axis_[k] = (static_cast<double>(k) - 0.5 * static_cast<double>(xi_points_ - 1)) * xi_spacing_;
  if (xi_points_ % 2 == 1) xi_axis_[xi_points_ / 2] = 0.0;
}

Point PhaseGrid::momentum(std::size_t k) const {
  if (dim() == 1) return {xi_axis_[k], 0.0};
  return {xi_axis_[k / xi_points_], xi_axis_[k % xi_points_]};
}

double PhaseGrid::momentum_norm2(std::size_t k) const {
  const Point p = momentum(k);
  return p[0] * p[0] + p[1] * p[1];
}

bool PhaseGrid::operator==(const PhaseGrid& other) const noexcept {
  return spatial_ == other.spatial_ && xi_half_width_ == other.xi_half_width_ && xi_points_ == other.xi_points_;
}

HusimiField::HusimiField(PhaseGrid phase, Eigen::MatrixXd values, HusimiSource source)
    : phase_(std::move(phase)), values_(std::move(values)), source_(source) {
  if (values_.rows() != static_cast<Eigen::Index>(phase_.spatial().size()) ||
      values_.cols() != static_cast<Eigen::Index>(phase_.momentum_size()))
    throw GridMismatch();
  if (values_.size() > 0 &&
      (values_.minCoeff() < -occupancy_tolerance || values_.maxCoeff() > 1.0 + occupancy_tolerance))
    throw InvariantError("phase-space occupation outside [0, 1]");
}

void HusimiField::write_text(std::ostream& out) const {
  out << std::setprecision(12);
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index k = 0; k < values_.cols(); ++k) out << (k ? " " : "") << values_(i, k);
    out << '\n';
  }
}

}  // namespace weyl
