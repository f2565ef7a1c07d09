#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "random_states.hpp"
#include "weyl/energies.hpp"

using namespace weyl;
using doctest::Approx;

TEST_CASE("Thomas-Fermi constants") {
  CHECK(TfConstants::for_dim(1).c_tf == Approx(std::numbers::pi * std::numbers::pi));
  CHECK(TfConstants::for_dim(2).c_tf == Approx(4.0 * std::numbers::pi));
}

TEST_CASE("hf_energy components against hand-assembled sums") {
  std::mt19937_64 rng(21);
  const Grid g(1, 2.0, 13);
  const InteractionSpec w = InteractionSpec::exponential(0.9, 0.7);
  const double hbar = 0.3, lambda = 1.7;
  const ModelSpec m(g, hbar, PotentialSpec::harmonic(1.2), w, 0.8, lambda);
  const DensityMatrix gamma(g, testing::random_admissible(13, rng));
  const Eigen::MatrixXd& G = gamma.matrix();

  const double kin = hbar * (kinetic_matrix(g, hbar).to_dense() * G).trace();
  double pot = 0.0, dir = 0.0, ex = 0.0;
  for (Eigen::Index i = 0; i < 13; ++i) {
    const double x = g.point(static_cast<std::size_t>(i))[0];
    pot += hbar * (1.2 * x * x - 0.8) * G(i, i);
    for (Eigen::Index j = 0; j < 13; ++j) {
      const double wij = w({x - g.point(static_cast<std::size_t>(j))[0], 0.0});
      dir += G(i, i) * G(j, j) * wij;
      ex += G(i, j) * G(i, j) * wij;
    }
  }
  const EnergyBreakdown e = hf_energy(m, gamma, true);
  CHECK(e.kinetic == Approx(kin).epsilon(1e-12));
  CHECK(e.potential == Approx(pot).epsilon(1e-12));
  CHECK(e.direct == Approx(0.5 * lambda * hbar * hbar * dir).epsilon(1e-12));
  CHECK(e.exchange == Approx(0.5 * lambda * hbar * hbar * ex).epsilon(1e-12));
  CHECK(e.total == Approx(e.kinetic + e.potential + e.direct - e.exchange));
  CHECK(hf_energy(m, gamma, false).exchange == 0.0);
}

TEST_CASE("a single orbital has no net self-interaction in HF") {
  std::mt19937_64 rng(2);
  const Grid g(1, 2.0, 21);
  const ModelSpec m(g, 0.5, PotentialSpec::harmonic(), InteractionSpec::gaussian(1.0, 0.5), 1.0);
  const Eigen::VectorXd u = testing::random_orthogonal(21, rng).col(0);
  const EnergyBreakdown e = hf_energy(m, DensityMatrix(g, u * u.transpose()), true);
  CHECK(e.direct == Approx(e.exchange).epsilon(1e-12));
}

TEST_CASE("factored and dense projector energies agree") {
  const Grid g(1, 2.5, 61);
  const ModelOperators ops(ModelSpec(g, 0.2, PotentialSpec::harmonic(), InteractionSpec::gaussian(1.0, 1.0), 1.0));
  const SpectralProjector p = spectral_projector(ops.one_body(), 0.0);
  for (bool ex : {false, true}) {
    const EnergyBreakdown a = hf_energy(ops, p, ex);
    const EnergyBreakdown b = hf_energy(ops, p.matrix(), ex);
    CHECK(a.total == Approx(b.total).epsilon(1e-12));
    CHECK(a.direct == Approx(b.direct).epsilon(1e-12));
  }
}

TEST_CASE("closed-form Thomas-Fermi energies for w = 0") {
  // d = 1: rho = sqrt(1 - x^2)_+ / pi, e = -1/4. The sign is negative: this is minus the
  // semiclassical trace of the negative part of -Delta + x^2 - 1, never +1/4.
  const Grid g1(1, 1.5, 30001);
  Field rho1(static_cast<Eigen::Index>(g1.size()));
  for (std::size_t i = 0; i < g1.size(); ++i)
    rho1[static_cast<Eigen::Index>(i)] = std::sqrt(std::max(0.0, 1.0 - g1.norm2(i))) / std::numbers::pi;
  const ModelSpec m1(g1, 0.1, PotentialSpec::harmonic(), InteractionSpec::none(), 1.0);
  CHECK(tf_energy(m1, Density(g1, rho1)).total == Approx(-0.25).epsilon(1e-5));

  // d = 2: rho = (1 - |x|^2)_+ / (4 pi), kinetic density (c_TF / 2) rho^2 = 2 pi rho^2, e = -1/24.
  const Grid g2(2, 1.5, 401);
  Field rho2(static_cast<Eigen::Index>(g2.size()));
  for (std::size_t i = 0; i < g2.size(); ++i)
    rho2[static_cast<Eigen::Index>(i)] = std::max(0.0, 1.0 - g2.norm2(i)) / (4.0 * std::numbers::pi);
  const ModelSpec m2(g2, 0.1, PotentialSpec::harmonic(), InteractionSpec::none(), 1.0);
  CHECK(tf_energy(m2, Density(g2, rho2)).total == Approx(-1.0 / 24.0).epsilon(1e-3));
}

TEST_CASE("direct term of densities matches the double integral") {
  const Grid g(1, 1.0, 9);
  const Density a(g, Field::LinSpaced(9, 0.0, 1.0));
  const Density b(g, Field::Constant(9, 2.0));
  const InteractionSpec w = InteractionSpec::gaussian(1.0, 0.4);
  double expect = 0.0;
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j)
      expect += a[i] * b[j] * w({g.point(i)[0] - g.point(j)[0], 0.0}) * g.weight() * g.weight();
  CHECK(direct_term(a, b, w) == Approx(expect).epsilon(1e-13));
}

TEST_CASE("coercivity constant and bound") {
  std::mt19937_64 rng(4);
  const Grid g(1, 2.5, 41);
  const ModelSpec m(g, 0.3, PotentialSpec::harmonic(), InteractionSpec::gaussian(1.0, 1.0), 1.0);
  const Eigen::MatrixXd h0 = schrodinger(m).to_dense();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.75 * h0 - 0.25 * Eigen::MatrixXd::Identity(41, 41));
  const double expect = -0.3 * eig.eigenvalues().cwiseMin(0.0).sum();
  CHECK(coercivity_constant(m) == Approx(expect).epsilon(1e-12));
  for (int c = 0; c < 50; ++c) {
    const CoercivityDiagnostic d = coercivity_check(m, DensityMatrix(g, testing::random_admissible(41, rng)));
    CHECK(d.holds);
  }
}
