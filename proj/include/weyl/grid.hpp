#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace weyl {

using Point = std::array<double, 2>;

/// Uniform tensor grid on the cube [-L, L]^dim, dim in {1, 2}.
///
/// Nodes are flattened row-major: in 2D the node (ix, iy) has index
/// ix * n + iy. Every field and operator in the library is indexed this way.
class Grid {
 public:
  Grid(int dim, double half_width, std::size_t points_per_axis);

  int dim() const noexcept { return dim_; }
  double half_width() const noexcept { return half_width_; }
  std::size_t points_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  /// Quadrature weight per node, spacing^dim.
  double weight() const noexcept { return weight_; }
  /// Total node count n^dim.
  std::size_t size() const noexcept { return size_; }

  const std::vector<double>& axis() const noexcept { return axis_; }
  Point point(std::size_t node) const;
  double norm2(std::size_t node) const;  // |x|^2
  std::array<std::size_t, 2> unflatten(std::size_t node) const;

  /// Index of the node nearest to x (clamped to the box).
  std::size_t nearest_node(const Point& x) const;
  /// Node index of the reflection x -> -x.
  std::size_t reflect(std::size_t node) const;

  bool operator==(const Grid& other) const noexcept;
  bool operator!=(const Grid& other) const noexcept { return !(*this == other); }

 private:
  int dim_;
  double half_width_;
  std::size_t n_;
  double spacing_;
  double weight_;
  std::size_t size_;
  std::vector<double> axis_;
};

Grid build_grid(int dim, double half_width, std::size_t points_per_axis);

using Field = Eigen::VectorXd;

/// Nonnegative particle density sampled on a grid (particles per volume).
class Density {
 public:
  /// Entries in [-1e-12, 0) are clamped to zero; anything more negative throws.
  Density(Grid grid, Field values);
  static Density zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const Field& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  /// Sum of values times the quadrature weight.
  double mass() const;

 private:
  Grid grid_;
  Field values_;
};

/// Quadrature integral of a field over the grid.
double integrate(const Grid& grid, const Field& f);

/// Linear (bi-linear in 2D) interpolation of a nodal field at x; zero outside the box.
double interpolate(const Grid& grid, const Field& f, const Point& x);

}  // namespace weyl
