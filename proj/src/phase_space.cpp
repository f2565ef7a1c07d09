#include "weyl/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

#include "weyl/errors.hpp"

namespace weyl {

CoherentFamily CoherentFamily::gaussian(int dim, double hbar) {
  if (dim != 1 && dim != 2) throw ConfigError("coherent states are defined for d = 1, 2");
  if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
  return CoherentFamily{dim, hbar, 0.5 * dim};
}

double CoherentFamily::window(const Point& y) const {
  return std::pow(std::numbers::pi, -0.25 * dim) * std::exp(-0.5 * (y[0] * y[0] + y[1] * y[1]));
}

double CoherentFamily::envelope(const Point& z) const {
  const double r2 = (z[0] * z[0] + z[1] * z[1]) / hbar;
  return std::pow(std::numbers::pi * hbar, -0.5 * dim) * std::exp(-r2);
}

double CoherentFamily::cutoff() const { return 8.0 * std::sqrt(hbar); }

double CoherentFamily::quadrature_norm(const Grid& grid) const {
  const Point centre = grid.point(grid.nearest_node({0.0, 0.0}));
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Point y = grid.point(j);
    sum += envelope({centre[0] - y[0], centre[1] - y[1]});
  }
  return sum * grid.weight();
}

PhaseGrid default_phase_grid(const ModelSpec& model, double margin, double spacing_factor) {
  const Field v = model.potential_field();
  const double xi = margin * std::sqrt(std::max(model.chemical_potential() - v.minCoeff(), 1.0));
  const double target = spacing_factor * std::sqrt(model.hbar());
  auto points = static_cast<std::size_t>(std::ceil(2.0 * xi / target)) + 1;
  if (points % 2 == 0) ++points;
  return PhaseGrid(model.grid(), xi, std::max<std::size_t>(points, 3));
}

namespace {

struct Window {
  std::vector<std::size_t> nodes;
  std::vector<std::array<std::ptrdiff_t, 2>> index;  // axis indices
  std::vector<double> samples;
  std::ptrdiff_t reach = 0;  // max axis index distance inside the window
};

Window window_at(const Grid& grid, const CoherentFamily& family, std::size_t node, bool amplitude) {
  const auto n = static_cast<std::ptrdiff_t>(grid.points_per_axis());
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(family.cutoff() / grid.spacing()));
  const auto centre = grid.unflatten(node);
  const Point x = grid.point(node);
  Window w;
  w.reach = 2 * reach;
  auto range = [&](std::size_t c) {
    const auto ci = static_cast<std::ptrdiff_t>(c);
    return std::pair{std::max<std::ptrdiff_t>(0, ci - reach), std::min<std::ptrdiff_t>(n - 1, ci + reach)};
  };
  const auto [x0, x1] = range(centre[0]);
  const auto [y0, y1] = grid.dim() == 2 ? range(centre[1]) : std::pair<std::ptrdiff_t, std::ptrdiff_t>{0, 0};
  for (std::ptrdiff_t a = x0; a <= x1; ++a) {
    for (std::ptrdiff_t b = y0; b <= y1; ++b) {
      const std::size_t j = grid.dim() == 1 ? static_cast<std::size_t>(a) : static_cast<std::size_t>(a * n + b);
      const Point y = grid.point(j);
      const double e = family.envelope({x[0] - y[0], x[1] - y[1]});
      w.nodes.push_back(j);
      w.index.push_back({a, b});
      w.samples.push_back(amplitude ? std::sqrt(e) : e);
    }
  }
  return w;
}

}  // namespace

HusimiField husimi_transform(const DensityMatrix& gamma, const CoherentFamily& family, const PhaseGrid& phase) {
  const Grid& grid = gamma.grid();
  if (phase.spatial() != grid) throw GridMismatch();
  if (family.dim != grid.dim()) throw GridMismatch();
  const Eigen::MatrixXd& g = gamma.matrix();
  const double h = grid.spacing();
  const std::size_t nxi = phase.momentum_size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(nxi));

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Window w = window_at(grid, family, i, true);
    const std::ptrdiff_t span = 2 * w.reach + 1;
    const std::ptrdiff_t ly = grid.dim() == 2 ? span : 1;
    const std::ptrdiff_t off_y = grid.dim() == 2 ? w.reach : 0;
    // c[lag] accumulates g_a g_b Gamma_ab over pairs with index difference lag; pairs (a, b) and
    // (b, a) give conjugate phases, so only a >= b is visited and cos(.) is used below.
    std::vector<double> c(static_cast<std::size_t>(span * ly), 0.0);
    const std::size_t count = w.nodes.size();
    for (std::size_t a = 0; a < count; ++a) {
      const auto ja = static_cast<Eigen::Index>(w.nodes[a]);
      const double ga = w.samples[a];
      c[static_cast<std::size_t>(w.reach * ly + off_y)] += ga * ga * g(ja, ja);
      for (std::size_t b = 0; b < a; ++b) {
        const auto la = w.index[a][0] - w.index[b][0] + w.reach;
        const auto lb = w.index[a][1] - w.index[b][1] + off_y;
        c[static_cast<std::size_t>(la * ly + lb)] += 2.0 * ga * w.samples[b] * g(ja, static_cast<Eigen::Index>(w.nodes[b]));
      }
    }
    const double scale = grid.weight();
    if (grid.dim() == 1) {
      // cos(l theta) by complex rotation, l = 0..reach (lags are nonnegative here).
      for (std::size_t k = 0; k < nxi; ++k) {
        const double theta = phase.momentum_axis()[k] * h / family.hbar;
        const std::complex<double> rot(std::cos(theta), std::sin(theta));
        std::complex<double> z(1.0, 0.0);
        double sum = 0.0;
        for (std::ptrdiff_t l = 0; l <= w.reach; ++l) {
          sum += c[static_cast<std::size_t>(l + w.reach)] * z.real();
          z *= rot;
        }
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = sum * scale;
      }
    } else {
      for (std::size_t k = 0; k < nxi; ++k) {
        const Point xi = phase.momentum(k);
        double sum = 0.0;
        for (std::ptrdiff_t la = 0; la < span; ++la)
          for (std::ptrdiff_t lb = 0; lb < span; ++lb) {
            const double v = c[static_cast<std::size_t>(la * span + lb)];
            if (v == 0.0) continue;
            const double arg =
                (xi[0] * static_cast<double>(la - w.reach) + xi[1] * static_cast<double>(lb - w.reach)) * h / family.hbar;
            sum += v * std::cos(arg);
          }
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = sum * scale;
      }
    }
  }
  return HusimiField(phase, std::move(m), HusimiSource::transform);
}

Density husimi_density(const HusimiField& m) { return Density(m.phase().spatial(), phase_space_density(m)); }

Field smeared_density(const DensityMatrix& gamma, const CoherentFamily& family) {
  const Grid& grid = gamma.grid();
  const Field rho = gamma.density();
  Field out(static_cast<Eigen::Index>(grid.size()));
  const double hd = std::pow(family.hbar, grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Window w = window_at(grid, family, i, false);
    double sum = 0.0;
    for (std::size_t a = 0; a < w.nodes.size(); ++a) sum += w.samples[a] * rho[static_cast<Eigen::Index>(w.nodes[a])];
    out[static_cast<Eigen::Index>(i)] = hd * sum * grid.weight();
  }
  return out;
}

void to_json(nlohmann::json& j, const HusimiIdentityReport& r) {
  j = nlohmann::json{{"density_residual", r.density_residual},
                     {"kinetic_residual", r.kinetic_residual},
                     {"potential_residual", r.potential_residual},
                     {"kinetic_magnitude", r.kinetic_magnitude},
                     {"trace_residual", r.trace_residual},
                     {"min_occupation", r.min_occupation},
                     {"max_occupation", r.max_occupation}};
}

HusimiIdentityReport kinetic_identity_check(const DensityMatrix& gamma, const CoherentFamily& family,
                                            const PhaseGrid& phase, const ModelSpec& model) {
  return kinetic_identity_check(gamma, husimi_transform(gamma, family, phase), family, model);
}

HusimiIdentityReport kinetic_identity_check(const DensityMatrix& gamma, const HusimiField& m,
                                            const CoherentFamily& family, const ModelSpec& model) {
  const Grid& grid = gamma.grid();
  const PhaseGrid& phase = m.phase();
  if (phase.spatial() != grid || model.grid() != grid) throw GridMismatch();
  const int d = grid.dim();
  const double hd = std::pow(family.hbar, d);
  const double norm = phase.momentum_weight() / std::pow(2.0 * std::numbers::pi, d);

  HusimiIdentityReport r;
  r.min_occupation = m.min_value();
  r.max_occupation = m.max_value();

  const Field rho_m = phase_space_density(m);
  const Field smeared = smeared_density(gamma, family);
  const double smeared_l1 = smeared.cwiseAbs().sum();
  r.density_residual = smeared_l1 > 0.0 ? (rho_m - smeared).cwiseAbs().sum() / smeared_l1 : 0.0;

  Eigen::VectorXd xi2(static_cast<Eigen::Index>(phase.momentum_size()));
  for (std::size_t k = 0; k < phase.momentum_size(); ++k) xi2[static_cast<Eigen::Index>(k)] = phase.momentum_norm2(k);
  const double lhs_kinetic = (m.values() * xi2).sum() * norm * grid.weight();
  const double trace = gamma.trace();
  const double rhs_kinetic = hd * kinetic_matrix(grid, family.hbar).trace_product(gamma.matrix()) +
                             hd * family.hbar * trace * family.gradient_norm2;
  r.kinetic_magnitude = std::abs(lhs_kinetic);

  const Field v = model.potential_field();
  const double lhs_potential = v.dot(rho_m) * grid.weight();
  const Field rho = gamma.density();
  double rhs_potential = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Window w = window_at(grid, family, j, false);
    double smeared_v = 0.0;
    for (std::size_t a = 0; a < w.nodes.size(); ++a) smeared_v += w.samples[a] * v[static_cast<Eigen::Index>(w.nodes[a])];
    rhs_potential += rho[static_cast<Eigen::Index>(j)] * smeared_v * grid.weight();
  }
  rhs_potential *= hd * grid.weight();

  if (r.kinetic_magnitude > 0.0) {
    r.kinetic_residual = std::abs(lhs_kinetic - rhs_kinetic) / r.kinetic_magnitude;
    r.potential_residual = std::abs(lhs_potential - rhs_potential) / r.kinetic_magnitude;
  }
  const double phase_trace = m.values().sum() * grid.weight() * phase.momentum_weight() /
                             std::pow(2.0 * std::numbers::pi * family.hbar, d);
  if (trace > 0.0) r.trace_residual = std::abs(phase_trace - trace) / trace;
  return r;
}

HusimiField bathtub_lift(const Density& rho, const TfConstants& constants, const PhaseGrid& phase) {
  const Grid& grid = rho.grid();
  if (phase.spatial() != grid) throw GridMismatch();
  if (constants.dim != grid.dim()) throw GridMismatch();
  const int d = grid.dim();
  const double dxi = phase.momentum_spacing();
  const double edge = phase.momentum_half_width() + 0.5 * dxi;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()),
                                            static_cast<Eigen::Index>(phase.momentum_size()));
  constexpr int supersample = 8;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p2 = constants.c_tf * std::pow(rho[i], 2.0 / d);
    if (p2 == 0.0) continue;
    const double p = std::sqrt(p2);
    if (p > edge) throw ConfigError("momentum grid too small for the Fermi ball of the density");
    for (std::size_t k = 0; k < phase.momentum_size(); ++k) {
      const Point xi = phase.momentum(k);
      double occ = 0.0;
      if (d == 1) {
        const double lo = std::max(xi[0] - 0.5 * dxi, -p);
        const double hi = std::min(xi[0] + 0.5 * dxi, p);
        occ = std::max(0.0, hi - lo) / dxi;
      } else {
        int inside = 0;
        for (int a = 0; a < supersample; ++a)
          for (int b = 0; b < supersample; ++b) {
            const double u = xi[0] + ((a + 0.5) / supersample - 0.5) * dxi;
            const double v = xi[1] + ((b + 0.5) / supersample - 0.5) * dxi;
            inside += u * u + v * v <= p2;
          }
        occ = static_cast<double>(inside) / (supersample * supersample);
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = occ;
    }
  }
  return HusimiField(phase, std::move(m), HusimiSource::bathtub);
}

void to_json(nlohmann::json& j, const RearrangementReport& r) {
  j = nlohmann::json{{"trials", r.trials},
                     {"bathtub_energy", r.bathtub_energy},
                     {"min_energy", r.min_energy},
                     {"min_relative_excess", r.min_relative_excess},
                     {"max_density_defect", r.max_density_defect}};
}

RearrangementReport rearrangement_check(const ModelSpec& model, const HusimiField& lift, std::uint64_t seed,
                                        int trials) {
  if (trials < 1) throw ConfigError("rearrangement trials must be positive");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd& base = lift.values();
  const Eigen::Index cols = base.cols();
  const Field rho = phase_space_density(lift);
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());

  RearrangementReport report;
  report.trials = trials;
  report.bathtub_energy = vlasov_energy(model, lift).total;
  report.min_energy = std::numeric_limits<double>::infinity();
  report.min_relative_excess = std::numeric_limits<double>::infinity();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(cols));
  Eigen::VectorXd column(cols);
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd m = base;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      column = m.row(i).transpose();
      switch (trial % 3) {
        case 0: {
          std::iota(order.begin(), order.end(), Eigen::Index{0});
          std::shuffle(order.begin(), order.end(), rng);
          for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = column[order[static_cast<std::size_t>(k)]];
          break;
        }
        case 1: {
          std::uniform_int_distribution<Eigen::Index> pick(0, cols - 1);
          const Eigen::Index swaps = pick(rng) + 1;
          for (Eigen::Index s = 0; s < swaps; ++s) std::swap(m(i, pick(rng)), m(i, pick(rng)));
          break;
        }
        default: {
          const Eigen::Index shift = std::uniform_int_distribution<Eigen::Index>(0, cols - 1)(rng);
          for (Eigen::Index k = 0; k < cols; ++k) m(i, (k + shift) % cols) = column[k];
        }
      }
    }
    const HusimiField competitor(lift.phase(), std::move(m), HusimiSource::explicit_values);
    report.max_density_defect =
        std::max(report.max_density_defect, (phase_space_density(competitor) - rho).cwiseAbs().maxCoeff() / scale);
    const double e = vlasov_energy(model, competitor).total;
    report.min_energy = std::min(report.min_energy, e);
    report.min_relative_excess =
        std::min(report.min_relative_excess, (e - report.bathtub_energy) / std::max(std::abs(report.bathtub_energy), 1e-300));
  }
  return report;
}

}  // namespace weyl
