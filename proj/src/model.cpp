#include "weyl/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "weyl/convolution.hpp"
#include "weyl/errors.hpp"

namespace weyl {

ModelSpec::ModelSpec(Grid grid, double hbar, PotentialSpec potential, InteractionSpec interaction,
                     double chemical_potential, double coupling, ValidationSettings validation)
    : grid_(std::move(grid)),
      hbar_(hbar),
      potential_(std::move(potential)),
      interaction_(std::move(interaction)),
      chemical_potential_(chemical_potential),
      coupling_(coupling),
      validation_(std::move(validation)) {
  if (!(hbar_ > 0.0)) throw ConfigError("hbar must be positive");
  if (!(coupling_ >= 0.0)) throw ConfigError("coupling lambda must be nonnegative");
}

double ModelSpec::hbar_d() const { return std::pow(hbar_, dim()); }

Field ModelSpec::potential_field() const { return potential_.sample(grid_); }

ModelSpec ModelSpec::with_grid(Grid grid) const {
  ModelSpec m = *this;
  m.grid_ = std::move(grid);
  return m;
}

ModelSpec ModelSpec::with_hbar(double hbar) const {
  return ModelSpec(grid_, hbar, potential_, interaction_, chemical_potential_, coupling_, validation_);
}

ModelSpec ModelSpec::with_coupling(double lambda) const {
  return ModelSpec(grid_, hbar_, potential_, interaction_, chemical_potential_, lambda, validation_);
}

ModelSpec ModelSpec::with_chemical_potential(double e) const {
  ModelSpec m = *this;
  m.chemical_potential_ = e;
  return m;
}

ModelSpec ModelSpec::with_interaction(InteractionSpec w) const {
  ModelSpec m = *this;
  m.interaction_ = std::move(w);
  return m;
}

namespace {

// Real DFT of a real even sequence laid out circulantly (c[0], c[1], ..., c[N-1]).
std::vector<double> real_dft(const std::vector<double>& c) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, c);
  std::vector<double> re(out.size());
  std::transform(out.begin(), out.end(), re.begin(), [](const std::complex<double>& z) { return z.real(); });
  return re;
}

}  // namespace

namespace {

// Odd circulant length 2m + 1 >= 2n - 1: padded until w has decayed at the wrap
// offset, so the truncation edge does not ring into spurious negative modes.
std::size_t circulant_half_span(const Grid& grid, const InteractionSpec& w) {
  const auto n = grid.points_per_axis();
  const double h = grid.spacing();
  const double w0 = std::max(std::abs(w(Point{0.0, 0.0})), 1e-300);
  const std::size_t cap = (grid.dim() == 1 ? 32 : 4) * n;
  std::size_t m = n - 1;
  while (m < cap && std::abs(w(Point{static_cast<double>(m) * h, 0.0})) > 1e-16 * w0) m *= 2;
  return std::min(std::max(m, n - 1), std::max(cap, n - 1));
}

}  // namespace

Field sampled_kernel_transform(const Grid& grid, const InteractionSpec& w) {
  const auto m = static_cast<std::ptrdiff_t>(circulant_half_span(grid, w));
  const std::size_t span = static_cast<std::size_t>(2 * m + 1);
  const double h = grid.spacing();
  // Circulant position p holds offset p for p <= m and p - span otherwise.
  auto offset = [&](std::size_t p) {
    const auto q = static_cast<std::ptrdiff_t>(p);
    return static_cast<double>(q <= m ? q : q - static_cast<std::ptrdiff_t>(span)) * h;
  };
  if (grid.dim() == 1) {
    std::vector<double> c(span);
    for (std::size_t p = 0; p < span; ++p) c[p] = w(Point{offset(p), 0.0});
    const auto re = real_dft(c);
    return Eigen::Map<const Eigen::VectorXd>(re.data(), static_cast<Eigen::Index>(re.size())) * grid.weight();
  }
  // Row-column 2D transform of the (even, hence real-spectrum) table.
  std::vector<std::complex<double>> data(span * span);
  for (std::size_t p = 0; p < span; ++p)
    for (std::size_t q = 0; q < span; ++q) data[p * span + q] = w(Point{offset(p), offset(q)});
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(span);
  std::vector<std::complex<double>> out;
  for (std::size_t p = 0; p < span; ++p) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(p * span), span, line.begin());
    fft.fwd(out, line);
    std::copy(out.begin(), out.end(), data.begin() + static_cast<std::ptrdiff_t>(p * span));
  }
  for (std::size_t q = 0; q < span; ++q) {
    for (std::size_t p = 0; p < span; ++p) line[p] = data[p * span + q];
    fft.fwd(out, line);
    for (std::size_t p = 0; p < span; ++p) data[p * span + q] = out[p];
  }
  Field result(static_cast<Eigen::Index>(span * span));
  for (std::size_t k = 0; k < span * span; ++k) result[static_cast<Eigen::Index>(k)] = data[k].real() * grid.weight();
  return result;
}

ValidationReport validate_model(const ModelSpec& model) {
  ValidationReport report;
  const Grid& grid = model.grid();
  const auto& w = model.interaction();
  const auto& cfg = model.validation();
  const KernelTable table(grid, w);
  const auto n = static_cast<std::ptrdiff_t>(grid.points_per_axis());

  double defect = 0.0;
  const double scale = std::max(1.0, std::abs(table.at(0, 0)));
  for (std::ptrdiff_t a = -(n - 1); a <= n - 1; ++a) {
    if (grid.dim() == 1) {
      defect = std::max(defect, std::abs(table.at(a) - table.at(-a)));
    } else {
      for (std::ptrdiff_t b = -(n - 1); b <= n - 1; ++b)
        defect = std::max(defect, std::abs(table.at(a, b) - table.at(-a, -b)));
    }
  }
  report.evenness_defect = defect;
  report.even = defect <= 1e-14 * scale;
  if (!report.even) report.failures.push_back("interaction is not even on the sampled offsets");

  report.mode = w.repulsivity;
  const Field transform = sampled_kernel_transform(grid, w);
  report.fourier_min = transform.minCoeff();
  report.negative_part_sup = std::max(0.0, -report.fourier_min);
  report.fourier_nonneg = report.fourier_min >= -cfg.tol_fourier;

  if (w.repulsivity == RepulsivityMode::fourier_nonneg) {
    if (!report.fourier_nonneg) {
      std::ostringstream msg;
      msg << "sampled interaction transform has minimum " << report.fourier_min << " < -" << cfg.tol_fourier;
      report.failures.push_back(msg.str());
    }
  } else if (grid.dim() == 1) {
    report.smallness_threshold = 0.5 / (2.0 * std::sqrt(std::numbers::pi));
    report.smallness_ok = report.negative_part_sup < *report.smallness_threshold;
  } else if (cfg.lieb_thirring_2d) {
    const double clt = *cfg.lieb_thirring_2d;
    report.smallness_threshold = 0.5 / (2.0 * std::numbers::pi * clt * clt);
    report.smallness_ok = report.negative_part_sup < *report.smallness_threshold;
  } else {
    report.smallness_ok = false;
    report.failures.push_back("smallness check in d = 2 needs validation.lieb_thirring_2d");
  }
  if (w.repulsivity == RepulsivityMode::smallness_d12 && report.smallness_threshold && !report.smallness_ok) {
    std::ostringstream msg;
    msg << "||(w^)_-||_inf = " << report.negative_part_sup << " is not below " << *report.smallness_threshold;
    report.failures.push_back(msg.str());
  }

  // Boundary nodes: any node with an axis index at 0 or n-1.
  const Field v = model.potential_field();
  double margin = std::numeric_limits<double>::infinity();
  const std::size_t np = grid.points_per_axis();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [ix, iy] = grid.unflatten(i);
    const bool edge = ix == 0 || ix == np - 1 || (grid.dim() == 2 && (iy == 0 || iy == np - 1));
    if (edge) margin = std::min(margin, v[static_cast<Eigen::Index>(i)] - model.chemical_potential());
  }
  report.confinement_margin = margin;
  report.confined = margin >= cfg.min_confinement_margin;
  if (!report.confined) {
    std::ostringstream msg;
    msg << "confinement margin V(boundary) - E = " << margin << " is below " << cfg.min_confinement_margin;
    report.failures.push_back(msg.str());
  }
  return report;
}

}  // namespace weyl
