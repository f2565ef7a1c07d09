#pragma once

#include <vector>

#include <json.hpp>

#include "weyl/config.hpp"
#include "weyl/grid.hpp"
#include "weyl/potentials.hpp"

namespace weyl {

/// One evaluation of (4 pi t)^{d/2} e^{-t(-Delta + W/t)}(x, x) against e^{-W(x)}.
struct HeatRow {
  double t = 0.0;
  Point x{0.0, 0.0};  // grid node actually used
  std::size_t points = 0;
  double value = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
};

/// Two-point Richardson extrapolation in t over the two smallest times.
struct HeatLimit {
  Point x{0.0, 0.0};
  double extrapolated = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
};

struct HeatReport {
  std::vector<HeatRow> rows;  // grouped by x, t in the configured order
  std::vector<HeatLimit> limits;
};

void to_json(nlohmann::json& j, const HeatReport& r);

/// W = V - E. Each t gets its own grid: dx = sqrt(t)/sqrt_t_cells on
/// [-(max|x| + sqrt_t_width sqrt(t)), +...]^d.
HeatReport heat_tauberian_report(const PotentialSpec& v, double chemical_potential, int dim,
                                 const HeatSettings& settings);

/// value = limit + c t through (t1, v1), (t2, v2).
double richardson_linear(double t1, double v1, double t2, double v2);

}  // namespace weyl
