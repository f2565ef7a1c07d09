#include "weyl/manybody.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "weyl/convolution.hpp"
#include "weyl/errors.hpp"
#include "weyl/operator_matrix.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

ModeBasis::ModeBasis(int modes, double hbar_d, Eigen::MatrixXd h, std::vector<double> w)
    : modes_(modes), hbar_d_(hbar_d), h_(std::move(h)), w_(std::move(w)) {
  const auto m = static_cast<std::size_t>(modes_);
  if (h_.rows() != modes_ || h_.cols() != modes_ || w_.size() != m * m * m * m)
    throw InvariantError("mode basis tensors have inconsistent sizes");
}

double ModeBasis::two_body(int a, int b, int c, int d) const {
  const auto m = static_cast<std::size_t>(modes_);
  return w_[((static_cast<std::size_t>(a) * m + static_cast<std::size_t>(b)) * m + static_cast<std::size_t>(c)) * m +
            static_cast<std::size_t>(d)];
}

double ModeBasis::symmetry_defect() const {
  double worst = 0.0;
  for (int a = 0; a < modes_; ++a)
    for (int b = 0; b < modes_; ++b)
      for (int c = 0; c < modes_; ++c)
        for (int d = 0; d < modes_; ++d) {
          const double v = two_body(a, b, c, d);
          worst = std::max({worst, std::abs(v - two_body(b, a, d, c)), std::abs(v - two_body(c, d, a, b))});
        }
  return worst;
}

ModeBasis project_modes(const ModelSpec& model, int modes) {
  if (modes < 1 || modes > ModeBasis::max_modes)
    throw ConfigError("number of modes must lie in [1, " + std::to_string(ModeBasis::max_modes) + "]");
  if (static_cast<std::size_t>(modes) > model.grid().size()) throw ConfigError("more modes than grid nodes");
  const OperatorMatrix h = schrodinger(model);
  const SymmetricEigensolver solver(h);
  const Eigen::MatrixXd u = solver.eigenvectors(0, modes);
  const Eigen::MatrixXd one_body = solver.eigenvalues().head(modes).asDiagonal();

  const auto m = static_cast<std::size_t>(modes);
  std::vector<double> w(m * m * m * m, 0.0);
  if (!model.interaction().is_zero()) {
    const KernelTable kernel(model.grid(), model.interaction());
    const double inv_weight = 1.0 / model.grid().weight();
    // Pair products u_a u_c and their convolutions, indexed by the unordered pair.
    std::vector<Field> pair(m * m);
    std::vector<Field> smeared(m * m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = a; c < m; ++c) {
        pair[a * m + c] = u.col(static_cast<Eigen::Index>(a)).cwiseProduct(u.col(static_cast<Eigen::Index>(c)));
        smeared[a * m + c] = kernel.convolve(pair[a * m + c]) * inv_weight;
      }
    auto key = [m](std::size_t a, std::size_t c) { return a <= c ? a * m + c : c * m + a; };
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        for (std::size_t c = 0; c < m; ++c)
          for (std::size_t d = 0; d < m; ++d)
            w[((a * m + b) * m + c) * m + d] = pair[key(a, c)].dot(smeared[key(b, d)]);
  }
  return ModeBasis(modes, model.hbar_d(), one_body, std::move(w));
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

namespace {

using Mask = std::uint32_t;

// a_k or a+_k on a bitmask state; returns false when the result vanishes.
bool annihilate(Mask& s, int k, int& sign) {
  if (!(s >> k & 1u)) return false;
  if (std::popcount(s & ((Mask{1} << k) - 1)) & 1) sign = -sign;
  s &= ~(Mask{1} << k);
  return true;
}

bool create(Mask& s, int k, int& sign) {
  if (s >> k & 1u) return false;
  if (std::popcount(s & ((Mask{1} << k) - 1)) & 1) sign = -sign;
  s |= Mask{1} << k;
  return true;
}

}  // namespace

double sector_ground(const ModeBasis& basis, int particles) {
  const int m = basis.modes();
  if (particles < 0 || particles > m) throw ConfigError("particle number outside [0, M]");
  if (particles == 0) return 0.0;
  if (binomial(m, particles) > max_sector_dimension) throw ConfigError("sector dimension exceeds the guard");

  std::vector<Mask> states;
  std::vector<int> index(std::size_t{1} << m, -1);
  for (Mask s = 0; s < (Mask{1} << m); ++s)
    if (std::popcount(s) == particles) {
      index[s] = static_cast<int>(states.size());
      states.push_back(s);
    }
  const auto dim = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd ham = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::MatrixXd& h = basis.one_body();
  const double half = 0.5 * basis.hbar_d();

  for (Eigen::Index col = 0; col < dim; ++col) {
    const Mask s = states[static_cast<std::size_t>(col)];
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a) {
        if (h(a, b) == 0.0) continue;
        Mask t = s;
        int sign = 1;
        if (!annihilate(t, b, sign) || !create(t, a, sign)) continue;
        ham(index[t], col) += sign * h(a, b);
      }
    // a+_a a+_b a_d a_c: apply a_c first.
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d) {
        Mask t1 = s;
        int s1 = 1;
        if (!annihilate(t1, c, s1) || !annihilate(t1, d, s1)) continue;
        for (int b = 0; b < m; ++b)
          for (int a = 0; a < m; ++a) {
            Mask t2 = t1;
            int s2 = s1;
            if (!create(t2, b, s2) || !create(t2, a, s2)) continue;
            ham(index[t2], col) += s2 * half * basis.two_body(a, b, c, d);
          }
      }
  }
  ham = 0.5 * (ham + ham.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[0];
}

void to_json(nlohmann::json& j, const SectorSpectrum& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n = 0; n < s.sector_energies.size(); ++n)
    rows.push_back({{"particles", n}, {"energy", s.sector_energies[n]}});
  j = nlohmann::json{{"sectors", rows}, {"argmin", s.argmin}, {"ground_energy", s.ground_energy},
                     {"interior", s.interior}};
}

SectorSpectrum grand_canonical_ground(const ModeBasis& basis, int max_particles) {
  if (max_particles < 0 || max_particles > basis.modes()) throw ConfigError("N_max outside [0, M]");
  SectorSpectrum s;
  for (int n = 0; n <= max_particles; ++n) s.sector_energies.push_back(sector_ground(basis, n));
  const auto best = std::min_element(s.sector_energies.begin(), s.sector_energies.end());
  s.argmin = static_cast<int>(best - s.sector_energies.begin());
  s.ground_energy = basis.hbar_d() * *best;
  s.interior = s.argmin < max_particles;
  return s;
}

namespace {

// F = h + hbar^d (J - K) with J_ac = sum W_abcd g_bd and K_ad = sum W_abcd g_bc.
Eigen::MatrixXd fock(const ModeBasis& basis, const Eigen::MatrixXd& g) {
  const int m = basis.modes();
  Eigen::MatrixXd f = basis.one_body();
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      double j = 0.0;
      double k = 0.0;
      for (int b = 0; b < m; ++b)
        for (int d = 0; d < m; ++d) {
          j += basis.two_body(a, b, c, d) * g(b, d);
          k += basis.two_body(a, b, d, c) * g(b, d);
        }
      f(a, c) += basis.hbar_d() * (j - k);
    }
  return 0.5 * (f + f.transpose());
}

Eigen::MatrixXd aufbau(const Eigen::MatrixXd& f) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(f);
  Eigen::Index count = 0;
  while (count < f.rows() && solver.eigenvalues()[count] < 0.0) ++count;
  const Eigen::MatrixXd u = solver.eigenvectors().leftCols(count);
  return u * u.transpose();
}

}  // namespace

double slater_energy(const ModeBasis& basis, const Eigen::MatrixXd& gamma) {
  const int m = basis.modes();
  double two = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
          two += basis.two_body(a, b, c, d) * (gamma(c, a) * gamma(d, b) - gamma(c, b) * gamma(d, a));
  return (basis.one_body() * gamma).trace() + 0.5 * basis.hbar_d() * two;
}

ModeHartreeFock mode_hartree_fock(const ModeBasis& basis, int max_iters, double tol) {
  ModeHartreeFock result;
  Eigen::MatrixXd g = aufbau(basis.one_body());
  double best = slater_energy(basis, g);
  Eigen::MatrixXd best_state = g;
  double energy = best;
  for (int iter = 1; iter <= max_iters; ++iter) {
    const Eigen::MatrixXd f = fock(basis, g);
    const Eigen::MatrixXd p = aufbau(f);
    const double ep = slater_energy(basis, p);
    if (ep < best) {
      best = ep;
      best_state = p;
    }
    // Exact quadratic along g + t (p - g).
    const Eigen::MatrixXd delta = p - g;
    const double slope = (f * delta).trace();
    const double curvature = slater_energy(basis, delta) * 2.0 - 2.0 * (basis.one_body() * delta).trace();
    double t = 1.0;
    if (curvature > 0.0) t = std::clamp(-slope / curvature, 0.0, 1.0);
    g += t * delta;
    const double next = slater_energy(basis, g);
    result.iterations = iter;
    const bool done = std::abs(next - energy) < tol && (t * delta).norm() < std::sqrt(tol);
    energy = next;
    if (done) {
      result.converged = true;
      break;
    }
  }
  const Eigen::MatrixXd p = aufbau(fock(basis, g));
  const double ep = slater_energy(basis, p);
  if (ep < best) {
    best = ep;
    best_state = p;
  }
  result.density = best_state;
  result.energy = basis.hbar_d() * best;
  result.particles = static_cast<int>(std::lround(best_state.trace()));
  return result;
}

}  // namespace weyl
