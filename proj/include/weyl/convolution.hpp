#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "weyl/grid.hpp"
#include "weyl/potentials.hpp"

namespace weyl {

/// w sampled on every node offset of a grid: entry (di, dj) holds
/// w(di * dx, dj * dx) for di, dj in [-(n-1), n-1].
class KernelTable {
 public:
  KernelTable(const Grid& grid, const InteractionSpec& w);

  const Grid& grid() const noexcept { return grid_; }
  double at(std::ptrdiff_t di, std::ptrdiff_t dj = 0) const;
  /// w(x_i - x_j)
  double between(std::size_t i, std::size_t j) const;
  bool is_zero() const noexcept { return zero_; }

  /// (w * f)(x_i) = sum_j w(x_i - x_j) f_j dx^d, direct quadrature.
  Field convolve(const Field& f) const;
  /// sum_ij a_i b_j w(x_i - x_j) dx^{2d}
  double quadratic_form(const Field& a, const Field& b) const;
  /// Dense W_ij = w(x_i - x_j).
  Eigen::MatrixXd matrix() const;

  /// Raw offset samples, row-major over (di + n - 1, dj + n - 1).
  const std::vector<double>& samples() const noexcept { return samples_; }

 private:
  Grid grid_;
  std::size_t span_;  // 2n - 1
  std::vector<double> samples_;
  bool zero_;
};

/// Free-function form of KernelTable::convolve.
Field convolve(const Field& f, const InteractionSpec& w, const Grid& grid);

}  // namespace weyl
