#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "random_states.hpp"
#include "weyl/errors.hpp"
#include "weyl/operator_matrix.hpp"
#include "weyl/spectral.hpp"

using namespace weyl;
using doctest::Approx;

namespace {

// Dirichlet second difference on n nodes: 4 sin^2(k pi / (2 (n + 1))) / dx^2, k = 1..n.
std::vector<double> dirichlet_levels(std::size_t n, double dx, double hbar) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n + 1)));
    out.push_back(hbar * hbar * 4.0 * s * s / (dx * dx));
  }
  return out;
}

}  // namespace

TEST_CASE("finite-difference Laplacian has the discrete Dirichlet spectrum") {
  const Grid g(1, 1.0, 41);
  const OperatorMatrix k = kinetic_matrix(g, 0.3);
  CHECK(k.is_tridiagonal());
  const auto expect = dirichlet_levels(41, g.spacing(), 0.3);
  const SymmetricEigensolver tri(k);
  const SymmetricEigensolver dense(OperatorMatrix::dense(g, k.to_dense()));
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(tri.eigenvalues()[static_cast<Eigen::Index>(i)] == Approx(expect[i]).epsilon(1e-12));
    CHECK(dense.eigenvalues()[static_cast<Eigen::Index>(i)] == Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("2D kinetic operator is the Kronecker sum of the 1D ones") {
  const Grid g(2, 1.0, 7);
  const auto one = dirichlet_levels(7, g.spacing(), 1.0);
  std::vector<double> sums;
  for (double a : one)
    for (double b : one) sums.push_back(a + b);
  std::sort(sums.begin(), sums.end());
  const SymmetricEigensolver s(kinetic_matrix(g, 1.0));
  for (std::size_t i = 0; i < sums.size(); ++i)
    CHECK(s.eigenvalues()[static_cast<Eigen::Index>(i)] == Approx(sums[i]).epsilon(1e-11));
}

TEST_CASE("harmonic oscillator levels hbar (2k + 1)") {
  const double hbar = 0.1;
  const ModelSpec m(Grid(1, 3.0, 1201), hbar, PotentialSpec::harmonic(), InteractionSpec::none(), 0.0);
  const SymmetricEigensolver s(schrodinger(m));
  for (int k = 0; k < 6; ++k) CHECK(s.eigenvalues()[k] == Approx(hbar * (2 * k + 1)).epsilon(1e-4));
}

TEST_CASE("eigenvector windows agree with a reference solver") {
  std::mt19937_64 rng(3);
  const Grid g(1, 1.0, 30);
  const Eigen::MatrixXd a = testing::random_admissible(30, rng) - 0.5 * Eigen::MatrixXd::Identity(30, 30);
  const OperatorMatrix h = OperatorMatrix::dense(g, a);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
  const SymmetricEigensolver s(h);
  const Eigen::MatrixXd u = s.eigenvectors(7, 5);
  for (Eigen::Index k = 0; k < 5; ++k) {
    CHECK(s.eigenvalues()[7 + k] == Approx(ref.eigenvalues()[7 + k]).epsilon(1e-12));
    CHECK((a * u.col(k) - s.eigenvalues()[7 + k] * u.col(k)).norm() < 1e-12);
    CHECK(std::abs(u.col(k).dot(ref.eigenvectors().col(7 + k))) == Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(s.eigenvectors(28, 3), std::out_of_range);
  CHECK_THROWS_AS(s.eigenvectors(-1, 1), std::out_of_range);
  const SpectralData full = eigensolve(h);
  CHECK(full.complete());
  CHECK(full.reconstruction_residual(h) < 1e-12);
  CHECK(full.count_below(0.0) == (ref.eigenvalues().array() < 0.0).count());
}

TEST_CASE("strict and closed projectors differ exactly on the threshold eigenspace") {
  const Grid g(1, 1.0, 3);
  const OperatorMatrix h = OperatorMatrix::tridiagonal(g, Eigen::Vector3d(-1.0, 0.0, 1.0), Eigen::Vector2d::Zero());
  const SpectralProjector strict = spectral_projector(h, 0.0, ProjectorMode::strict);
  const SpectralProjector closed = spectral_projector(h, 0.0, ProjectorMode::closed);
  CHECK(strict.trace() == 1.0);
  CHECK(closed.trace() == 2.0);
  CHECK(strict.degeneracy == 1);
  CHECK(strict.gap == Approx(0.0));
  CHECK(strict.density()[0] == Approx(1.0 / g.weight()));
}

TEST_CASE("heat diagonal matches the sine-mode expansion") {
  const std::size_t n = 25;
  const Grid g(1, 1.0, n);
  const OperatorMatrix k = kinetic_matrix(g, 1.0);
  const auto levels = dirichlet_levels(n, g.spacing(), 1.0);
  const double t = 0.01;
  for (std::size_t node : {std::size_t{0}, std::size_t{6}, std::size_t{12}}) {
    double sum = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
      const double u = std::sqrt(2.0 / static_cast<double>(n + 1)) *
                       std::sin(static_cast<double>((node + 1) * m) * std::numbers::pi / static_cast<double>(n + 1));
      sum += std::exp(-t * levels[m - 1]) * u * u / g.weight();
    }
    CHECK(heat_diag(k, t, node) == Approx(sum).epsilon(1e-12));
  }
  const OperatorMatrix deep = OperatorMatrix::tridiagonal(g, Eigen::VectorXd::Constant(n, -1000.0),
                                                          Eigen::VectorXd::Zero(n - 1));
  CHECK_THROWS_AS(heat_diag(deep, 1.0, 0), InvariantError);
}

TEST_CASE("mean-field operator: Hartree diagonal and exchange matrix") {
  std::mt19937_64 rng(9);
  const Grid g(1, 2.0, 15);
  const InteractionSpec w = InteractionSpec::gaussian(0.8, 0.6);
  const ModelSpec m(g, 0.4, PotentialSpec::harmonic(), w, 1.0, 1.5);
  const DensityMatrix gamma(g, testing::random_admissible(15, rng));
  Eigen::MatrixXd expect_rhf = kinetic_matrix(g, 0.4).to_dense();
  Eigen::MatrixXd exchange = Eigen::MatrixXd::Zero(15, 15);
  for (std::size_t i = 0; i < 15; ++i) {
    double hartree = 0.0;
    for (std::size_t j = 0; j < 15; ++j) {
      const Point d{g.point(i)[0] - g.point(j)[0], 0.0};
      hartree += w(d) * gamma.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
      exchange(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          w(d) * gamma.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const double x = g.point(i)[0];
    expect_rhf(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += x * x - 1.0 + 1.5 * 0.4 * hartree;
  }
  // w * rho with rho = Gamma_jj / dx equals sum_j w Gamma_jj; both carry lambda hbar^d.
  CHECK((mean_field_operator(m, gamma, false).to_dense() - expect_rhf).norm() < 1e-12);
  const Eigen::MatrixXd expect_hf = expect_rhf - 1.5 * 0.4 * exchange;
  CHECK((mean_field_operator(m, gamma, true).to_dense() - expect_hf).norm() < 1e-10);
}

TEST_CASE("density matrix checks") {
  const Grid g(1, 1.0, 4);
  CHECK_THROWS_AS(DensityMatrix(g, Eigen::MatrixXd::Identity(3, 3)), GridMismatch);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(4, 4);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(DensityMatrix(g, asym), InvariantError);
  const DensityMatrix over(g, 1.5 * Eigen::MatrixXd::Identity(4, 4));
  CHECK_FALSE(over.admissible());
  CHECK(over.occupation_range().second == Approx(1.5));
  CHECK(DensityMatrix(g, 0.5 * Eigen::MatrixXd::Identity(4, 4)).density()[0] == Approx(0.5 / g.weight()));
}
