#include "weyl/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weyl/errors.hpp"
#include "weyl/operator_matrix.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

double richardson_linear(double t1, double v1, double t2, double v2) {
  if (t1 == t2) throw ConfigError("Richardson extrapolation needs two distinct times");
  return (t1 * v2 - t2 * v1) / (t1 - t2);
}

void to_json(nlohmann::json& j, const HeatReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t},
                    {"x", {row.x[0], row.x[1]}},
                    {"points", row.points},
                    {"value", row.value},
                    {"target", row.target},
                    {"rel_error", row.rel_error}});
  nlohmann::json limits = nlohmann::json::array();
  for (const auto& l : r.limits)
    limits.push_back({{"x", {l.x[0], l.x[1]}},
                      {"extrapolated", l.extrapolated},
                      {"target", l.target},
                      {"rel_error", l.rel_error}});
  j = nlohmann::json{{"rows", rows}, {"limits", limits}};
}

HeatReport heat_tauberian_report(const PotentialSpec& v, double chemical_potential, int dim,
                                 const HeatSettings& settings) {
  if (settings.times.empty() || settings.points.empty()) throw ConfigError("heat report needs times and points");
  double reach = 0.0;
  for (const Point& x : settings.points) reach = std::max({reach, std::abs(x[0]), dim == 2 ? std::abs(x[1]) : 0.0});

  const std::size_t nx = settings.points.size();
  std::vector<std::vector<HeatRow>> per_point(nx);
  for (const double t : settings.times) {
    if (!(t > 0.0)) throw ConfigError("heat times must be positive");
    const double dx = std::sqrt(t) / settings.sqrt_t_cells;
    const double half_width = reach + settings.sqrt_t_width * std::sqrt(t);
    auto n = static_cast<std::size_t>(std::ceil(2.0 * half_width / dx)) + 1;
    if (n % 2 == 0) ++n;
    const Grid grid(dim, half_width, n);
    const Field w = v.sample(grid).array() - chemical_potential;
    const OperatorMatrix h = kinetic_matrix(grid, 1.0).plus_diagonal(w / t);
    const SpectralData spectrum = eigensolve(h);
    const double norm = std::pow(4.0 * std::numbers::pi * t, 0.5 * dim);
    for (std::size_t k = 0; k < nx; ++k) {
      const std::size_t node = grid.nearest_node(settings.points[k]);
      HeatRow row;
      row.t = t;
      row.x = grid.point(node);
      row.points = n;
      row.value = norm * heat_diag(spectrum, grid, t, node);
      row.target = std::exp(-w[static_cast<Eigen::Index>(node)]);
      row.rel_error = std::abs(row.value - row.target) / row.target;
      per_point[k].push_back(row);
    }
  }

  HeatReport report;
  for (std::size_t k = 0; k < nx; ++k) {
    auto rows = per_point[k];
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    if (rows.size() < 2) continue;
    std::sort(rows.begin(), rows.end(), [](const HeatRow& a, const HeatRow& b) { return a.t < b.t; });
    HeatLimit limit;
    limit.x = settings.points[k];
    limit.extrapolated = richardson_linear(rows[0].t, rows[0].value, rows[1].t, rows[1].value);
    const double wx = v(limit.x, dim) - chemical_potential;
    limit.target = std::exp(-wx);
    limit.rel_error = std::abs(limit.extrapolated - limit.target) / limit.target;
    report.limits.push_back(limit);
  }
  return report;
}

}  // namespace weyl
