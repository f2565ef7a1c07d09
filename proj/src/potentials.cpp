#include "weyl/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "weyl/errors.hpp"

namespace weyl {

Table1D::Table1D(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2) throw ConfigError("table needs at least two (x, value) rows");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw ConfigError("table abscissae must be strictly increasing");
  }
}

Table1D Table1D::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table file: " + path);
  std::vector<double> x;
  std::vector<double> y;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double a = 0.0;
    double b = 0.0;
    if (!(row >> a)) continue;
    if (!(row >> b)) throw ConfigError("table row with a single column in " + path);
    x.push_back(a);
    y.push_back(b);
  }
  return Table1D(std::move(x), std::move(y));
}

double Table1D::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double t = (x - x_[k]) / (x_[k + 1] - x_[k]);
  return (1.0 - t) * y_[k] + t * y_[k + 1];
}

PotentialSpec PotentialSpec::harmonic(double k) {
  PotentialSpec v;
  v.kind = Kind::harmonic;
  v.strength = k;
  return v;
}

PotentialSpec PotentialSpec::quartic(double k) {
  PotentialSpec v;
  v.kind = Kind::quartic;
  v.strength = k;
  return v;
}

PotentialSpec PotentialSpec::double_well(double k, double b) {
  PotentialSpec v;
  v.kind = Kind::double_well;
  v.strength = k;
  v.well_position = b;
  return v;
}

PotentialSpec PotentialSpec::tabulated(Table1D t) {
  PotentialSpec v;
  v.kind = Kind::tabulated;
  v.table = std::move(t);
  return v;
}

double PotentialSpec::operator()(const Point& x, int dim) const {
  const double r2 = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
  switch (kind) {
    case Kind::harmonic:
      return strength * r2;
    case Kind::quartic:
      return strength * r2 * r2;
    case Kind::double_well: {
      const double s = r2 - well_position * well_position;
      return strength * s * s;
    }
    case Kind::tabulated:
      return dim == 1 ? table(x[0]) : table(std::sqrt(r2));
  }
  return 0.0;
}

Field PotentialSpec::sample(const Grid& grid) const {
  Field v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = (*this)(grid.point(i), grid.dim());
  return v;
}

InteractionSpec InteractionSpec::none() { return constant(0.0); }

InteractionSpec InteractionSpec::gaussian(double a, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian interaction needs sigma > 0");
  InteractionSpec w;
  w.kind = Kind::gaussian;
  w.amplitude = a;
  w.range = sigma;
  return w;
}

InteractionSpec InteractionSpec::exponential(double a, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("exponential interaction needs sigma > 0");
  InteractionSpec w;
  w.kind = Kind::exponential;
  w.amplitude = a;
  w.range = sigma;
  return w;
}

InteractionSpec InteractionSpec::constant(double a) {
  InteractionSpec w;
  w.kind = Kind::constant;
  w.amplitude = a;
  return w;
}

InteractionSpec InteractionSpec::tabulated_even(Table1D t) {
  InteractionSpec w;
  w.kind = Kind::tabulated_even;
  w.table = std::move(t);
  return w;
}

double InteractionSpec::operator()(const Point& x) const {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  switch (kind) {
    case Kind::gaussian:
      return amplitude * std::exp(-r2 / (2.0 * range * range));
    case Kind::exponential:
      return amplitude * std::exp(-std::sqrt(r2) / range);
    case Kind::tabulated_even:
      return table(std::sqrt(r2));
    case Kind::constant:
      return amplitude;
  }
  return 0.0;
}

bool InteractionSpec::is_zero() const noexcept {
  switch (kind) {
    case Kind::tabulated_even:
      return std::all_of(table.values().begin(), table.values().end(), [](double v) { return v == 0.0; });
    default:
      return amplitude == 0.0;
  }
}

bool InteractionSpec::is_pointwise_nonnegative() const {
  if (kind == Kind::tabulated_even)
    return std::all_of(table.values().begin(), table.values().end(), [](double v) { return v >= 0.0; });
  return amplitude >= 0.0;
}

}  // namespace weyl
