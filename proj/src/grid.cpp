#include "weyl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weyl/errors.hpp"

namespace weyl {

Grid::Grid(int dim, double half_width, std::size_t points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis) {
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (points_per_axis < 3) throw ConfigError("grid needs at least 3 points per axis");
  if (!(half_width > 0.0)) throw ConfigError("grid half-width must be positive");
  spacing_ = 2.0 * half_width / static_cast<double>(n_ - 1);
  weight_ = std::pow(spacing_, dim_);
  size_ = dim_ == 1 ? n_ : n_ * n_;
  axis_.resize(n_);
  // Symmetric construction so that axis_[k] == -axis_[n-1-k] exactly.
  for (std::size_t k = 0; k < n_; ++k) {
    const double offset = (static_cast<double>(k) - 0.5 * static_cast<double>(n_ - 1)) * spacing_;
    axis_[k] = offset;
  }
  axis_.front() = -half_width;
  axis_.back() = half_width;
  if (n_ % 2 == 1) axis_[n_ / 2] = 0.0;
}

std::array<std::size_t, 2> Grid::unflatten(std::size_t node) const {
  if (dim_ == 1) return {node, 0};
  return {node / n_, node % n_};
}

Point Grid::point(std::size_t node) const {
  if (dim_ == 1) return {axis_[node], 0.0};
  const auto [ix, iy] = unflatten(node);
  return {axis_[ix], axis_[iy]};
}

double Grid::norm2(std::size_t node) const {
  const Point p = point(node);
  return p[0] * p[0] + p[1] * p[1];
}

std::size_t Grid::nearest_node(const Point& x) const {
  auto axis_index = [&](double c) {
    const double k = std::round((c + half_width_) / spacing_);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n_ - 1)));
  };
  if (dim_ == 1) return axis_index(x[0]);
  return axis_index(x[0]) * n_ + axis_index(x[1]);
}

std::size_t Grid::reflect(std::size_t node) const {
  if (dim_ == 1) return n_ - 1 - node;
  const auto [ix, iy] = unflatten(node);
  return (n_ - 1 - ix) * n_ + (n_ - 1 - iy);
}

bool Grid::operator==(const Grid& other) const noexcept {
  return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
}

Grid build_grid(int dim, double half_width, std::size_t points_per_axis) {
  return Grid(dim, half_width, points_per_axis);
}

Density::Density(Grid grid, Field values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) throw GridMismatch();
  for (auto& v : values_) {
    if (v < -1e-12) throw ConfigError("density has a negative entry: " + std::to_string(v));
    if (v < 0.0) v = 0.0;
  }
}

Density Density::zeros(const Grid& grid) {
  return Density(grid, Field::Zero(static_cast<Eigen::Index>(grid.size())));
}

double Density::mass() const { return integrate(grid_, values_); }

double integrate(const Grid& grid, const Field& f) {
  if (static_cast<std::size_t>(f.size()) != grid.size()) throw GridMismatch();
  return f.sum() * grid.weight();
}

double interpolate(const Grid& grid, const Field& f, const Point& x) {
  const double L = grid.half_width();
  const double h = grid.spacing();
  const std::size_t n = grid.points_per_axis();
  auto locate = [&](double c, std::size_t& k, double& frac) {
    if (c < -L || c > L) return false;
    double s = (c + L) / h;
    s = std::min(s, static_cast<double>(n - 1));
    k = std::min(static_cast<std::size_t>(std::floor(s)), n - 2);
    frac = s - static_cast<double>(k);
    return true;
  };
  std::size_t kx = 0;
  double fx = 0.0;
  if (!locate(x[0], kx, fx)) return 0.0;
  if (grid.dim() == 1) return (1.0 - fx) * f[static_cast<Eigen::Index>(kx)] + fx * f[static_cast<Eigen::Index>(kx + 1)];
  std::size_t ky = 0;
  double fy = 0.0;
  if (!locate(x[1], ky, fy)) return 0.0;
  auto at = [&](std::size_t i, std::size_t j) { return f[static_cast<Eigen::Index>(i * n + j)]; };
  return (1 - fx) * (1 - fy) * at(kx, ky) + fx * (1 - fy) * at(kx + 1, ky) +
         (1 - fx) * fy * at(kx, ky + 1) + fx * fy * at(kx + 1, ky + 1);
}

}  // namespace weyl
