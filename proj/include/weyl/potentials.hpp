#pragma once

#include <string>
#include <vector>

#include "weyl/grid.hpp"

namespace weyl {

/// Piecewise-linear table (abscissa ascending), constant extrapolation at the ends.
class Table1D {
 public:
  Table1D() = default;
  Table1D(std::vector<double> x, std::vector<double> y);
  /// Two whitespace-separated columns per line; '#' starts a comment.
  static Table1D load(const std::string& path);

  double operator()(double x) const;
  bool empty() const noexcept { return x_.empty(); }
  const std::vector<double>& abscissae() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// External confining potential V.
///
///  harmonic     V = k |x|^2
///  quartic      V = k |x|^4
///  double_well  V = k (|x|^2 - b^2)^2
///  tabulated    V = table(x) in 1D, table(|x|) in 2D
struct PotentialSpec {
  enum class Kind { harmonic, quartic, double_well, tabulated };

  Kind kind = Kind::harmonic;
  double strength = 1.0;  // k
  double well_position = 1.0;  // b, double well only
  Table1D table;

  static PotentialSpec harmonic(double k = 1.0);
  static PotentialSpec quartic(double k = 1.0);
  static PotentialSpec double_well(double k, double b);
  static PotentialSpec tabulated(Table1D t);

  double operator()(const Point& x, int dim) const;
  Field sample(const Grid& grid) const;
};

enum class RepulsivityMode { fourier_nonneg, smallness_d12 };

/// Even pair interaction w.
///
///  gaussian        w = a exp(-|x|^2 / (2 sigma^2))
///  exponential     w = a exp(-|x| / sigma)
///  tabulated_even  w = table(|x|)
///  constant        w = a  (test kernel; a = 0 gives the non-interacting model)
struct InteractionSpec {
  enum class Kind { gaussian, exponential, tabulated_even, constant };

  Kind kind = Kind::constant;
  double amplitude = 0.0;
  double range = 1.0;  // sigma
  Table1D table;
  RepulsivityMode repulsivity = RepulsivityMode::fourier_nonneg;

  static InteractionSpec none();
  static InteractionSpec gaussian(double a, double sigma);
  static InteractionSpec exponential(double a, double sigma);
  static InteractionSpec constant(double a);
  static InteractionSpec tabulated_even(Table1D t);

  double operator()(const Point& x) const;
  /// True when w vanishes identically.
  bool is_zero() const noexcept;
  /// Pointwise nonnegative on the whole line (not just the samples).
  bool is_pointwise_nonnegative() const;
};

}  // namespace weyl
