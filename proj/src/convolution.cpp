#include "weyl/convolution.hpp"

#include <algorithm>

#include "weyl/errors.hpp"

namespace weyl {

KernelTable::KernelTable(const Grid& grid, const InteractionSpec& w)
    : grid_(grid), span_(2 * grid.points_per_axis() - 1), zero_(w.is_zero()) {
  const auto n = static_cast<std::ptrdiff_t>(grid.points_per_axis());
  const double h = grid.spacing();
  if (grid.dim() == 1) {
    samples_.resize(span_);
    for (std::ptrdiff_t d = -(n - 1); d <= n - 1; ++d)
      samples_[static_cast<std::size_t>(d + n - 1)] = w({static_cast<double>(d) * h, 0.0});
  } else {
    samples_.resize(span_ * span_);
    for (std::ptrdiff_t a = -(n - 1); a <= n - 1; ++a)
      for (std::ptrdiff_t b = -(n - 1); b <= n - 1; ++b)
        samples_[static_cast<std::size_t>(a + n - 1) * span_ + static_cast<std::size_t>(b + n - 1)] =
            w({static_cast<double>(a) * h, static_cast<double>(b) * h});
  }
}

double KernelTable::at(std::ptrdiff_t di, std::ptrdiff_t dj) const {
  const auto off = static_cast<std::ptrdiff_t>(grid_.points_per_axis()) - 1;
  if (grid_.dim() == 1) return samples_[static_cast<std::size_t>(di + off)];
  return samples_[static_cast<std::size_t>(di + off) * span_ + static_cast<std::size_t>(dj + off)];
}

double KernelTable::between(std::size_t i, std::size_t j) const {
  if (grid_.dim() == 1) return at(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j));
  const auto [ix, iy] = grid_.unflatten(i);
  const auto [jx, jy] = grid_.unflatten(j);
  return at(static_cast<std::ptrdiff_t>(ix) - static_cast<std::ptrdiff_t>(jx),
            static_cast<std::ptrdiff_t>(iy) - static_cast<std::ptrdiff_t>(jy));
}

Field KernelTable::convolve(const Field& f) const {
  if (static_cast<std::size_t>(f.size()) != grid_.size()) throw GridMismatch();
  Field out = Field::Zero(f.size());
  if (zero_) return out;
  const std::size_t n = grid_.points_per_axis();
  const double weight = grid_.weight();
  if (grid_.dim() == 1) {
    // out_i = sum_j k[i - j + n - 1] f_j; reversing k turns each row into a contiguous dot product.
    const Eigen::Map<const Eigen::VectorXd> k(samples_.data(), static_cast<Eigen::Index>(span_));
    const Eigen::VectorXd kr = k.reverse();
    const auto ni = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < ni; ++i) out[i] = kr.segment(ni - 1 - i, ni).dot(f);
    return out * weight;
  }
  const auto ni = static_cast<Eigen::Index>(n);
  for (std::size_t ix = 0; ix < n; ++ix) {
    for (std::size_t jx = 0; jx < n; ++jx) {
      const std::size_t row = (ix + n - 1 - jx) * span_;
      const Eigen::Map<const Eigen::VectorXd> k(samples_.data() + row, static_cast<Eigen::Index>(span_));
      const Eigen::VectorXd kr = k.reverse();
      const auto fj = f.segment(static_cast<Eigen::Index>(jx * n), ni);
      for (Eigen::Index iy = 0; iy < ni; ++iy)
        out[static_cast<Eigen::Index>(ix * n) + iy] += kr.segment(ni - 1 - iy, ni).dot(fj);
    }
  }
  return out * weight;
}

double KernelTable::quadratic_form(const Field& a, const Field& b) const {
  if (zero_) return 0.0;
  return a.dot(convolve(b)) * grid_.weight();
}

Eigen::MatrixXd KernelTable::matrix() const {
  const auto size = static_cast<Eigen::Index>(grid_.size());
  Eigen::MatrixXd w(size, size);
  for (Eigen::Index j = 0; j < size; ++j)
    for (Eigen::Index i = 0; i < size; ++i)
      w(i, j) = between(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return w;
}

Field convolve(const Field& f, const InteractionSpec& w, const Grid& grid) {
  return KernelTable(grid, w).convolve(f);
}

}  // namespace weyl
