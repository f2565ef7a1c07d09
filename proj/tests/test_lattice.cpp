#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "weyl/config.hpp"
#include "weyl/convolution.hpp"
#include "weyl/errors.hpp"
#include "weyl/grid.hpp"
#include "weyl/model.hpp"

using namespace weyl;
using doctest::Approx;

TEST_CASE("grid nodes, weights and flattening") {
  const Grid g1(1, 2.0, 5);
  CHECK(g1.spacing() == Approx(1.0));
  CHECK(g1.weight() == Approx(1.0));
  CHECK(g1.point(0)[0] == Approx(-2.0));
  CHECK(g1.point(4)[0] == Approx(2.0));
  CHECK(g1.reflect(1) == 3);

  const Grid g2(2, 1.0, 3);
  CHECK(g2.size() == 9);
  CHECK(g2.weight() == Approx(1.0));
  const auto [ix, iy] = g2.unflatten(5);
  CHECK(ix == 1);
  CHECK(iy == 2);
  CHECK(g2.point(5)[0] == Approx(0.0));
  CHECK(g2.point(5)[1] == Approx(1.0));
  CHECK(g2.nearest_node({0.1, 0.9}) == 5);
  CHECK(g2.norm2(8) == Approx(2.0));
  CHECK_THROWS(Grid(3, 1.0, 5));
}

TEST_CASE("interpolation is exact on affine fields and vanishes outside the box") {
  const Grid g(1, 1.0, 11);
  Field f(11);
  for (std::size_t i = 0; i < 11; ++i) f[static_cast<Eigen::Index>(i)] = 3.0 * g.point(i)[0] - 0.5;
  CHECK(interpolate(g, f, {0.37, 0.0}) == Approx(3.0 * 0.37 - 0.5));
  CHECK(interpolate(g, f, {1.5, 0.0}) == 0.0);

  const Grid g2(2, 1.0, 5);
  Field h(25);
  for (std::size_t i = 0; i < 25; ++i) h[static_cast<Eigen::Index>(i)] = 2.0 * g2.point(i)[0] + g2.point(i)[1];
  CHECK(interpolate(g2, h, {0.3, -0.2}) == Approx(0.4));
}

TEST_CASE("density clamps roundoff negatives and rejects real ones") {
  const Grid g(1, 1.0, 3);
  const Density ok(g, Field::Constant(3, -1e-14));
  CHECK(ok.values().minCoeff() == 0.0);
  CHECK_THROWS(Density(g, Field::Constant(3, -1e-6)));
  CHECK(Density(g, Field::Constant(3, 2.0)).mass() == Approx(6.0));
}

TEST_CASE("potentials and tables") {
  CHECK(PotentialSpec::harmonic(2.0)({0.5, 0.0}, 1) == Approx(0.5));
  CHECK(PotentialSpec::quartic(1.0)({1.0, 1.0}, 2) == Approx(4.0));
  CHECK(PotentialSpec::double_well(1.0, 1.0)({1.0, 0.0}, 1) == Approx(0.0));
  const Table1D t({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
  CHECK(t(0.25) == Approx(0.5));
  CHECK(t(-1.0) == Approx(0.0));
  CHECK(t(5.0) == Approx(0.0));
}

TEST_CASE("kernel convolution matches the direct double sum") {
  const Grid g(1, 2.0, 17);
  const KernelTable k(g, InteractionSpec::gaussian(1.3, 0.7));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Field a(17), b(17);
  for (Eigen::Index i = 0; i < 17; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  const Field conv = k.convolve(a);
  double form = 0.0;
  for (std::size_t i = 0; i < 17; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 17; ++j) {
      const double r = g.point(i)[0] - g.point(j)[0];
      const double w = 1.3 * std::exp(-r * r / (2.0 * 0.49));
      s += w * a[static_cast<Eigen::Index>(j)] * g.weight();
      form += a[static_cast<Eigen::Index>(i)] * b[static_cast<Eigen::Index>(j)] * w * g.weight() * g.weight();
    }
    CHECK(conv[static_cast<Eigen::Index>(i)] == Approx(s).epsilon(1e-13));
  }
  CHECK(k.quadratic_form(a, b) == Approx(form).epsilon(1e-13));
}

TEST_CASE("validation: repulsivity, smallness and confinement") {
  const Grid g(1, 3.0, 121);
  const ModelSpec good(g, 0.1, PotentialSpec::harmonic(), InteractionSpec::gaussian(1.0, 1.0), 1.0);
  CHECK(validate_model(good).ok());

  const ModelSpec attractive(g, 0.1, PotentialSpec::harmonic(), InteractionSpec::gaussian(-1.0, 1.0), 1.0);
  const ValidationReport bad = validate_model(attractive);
  CHECK_FALSE(bad.fourier_nonneg);
  CHECK_FALSE(bad.ok());

  // Sup of the negative part of the transform of -a e^{-x^2/2} is a sqrt(2 pi).
  auto small = [&](double a) {
    InteractionSpec w = InteractionSpec::gaussian(-a, 1.0);
    w.repulsivity = RepulsivityMode::smallness_d12;
    return validate_model(ModelSpec(g, 0.1, PotentialSpec::harmonic(), w, 1.0));
  };
  const ValidationReport weak = small(0.01);
  CHECK(weak.ok());
  CHECK(weak.negative_part_sup == Approx(0.01 * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-6));
  CHECK(*weak.smallness_threshold == Approx(1.0 / (4.0 * std::sqrt(std::numbers::pi))));
  CHECK_FALSE(small(0.2).ok());

  InteractionSpec w2 = InteractionSpec::gaussian(-0.01, 1.0);
  w2.repulsivity = RepulsivityMode::smallness_d12;
  const ModelSpec plane(Grid(2, 3.0, 21), 0.1, PotentialSpec::harmonic(), w2, 1.0);
  CHECK_FALSE(validate_model(plane).ok());

  const ModelSpec loose(Grid(1, 1.0, 21), 0.1, PotentialSpec::harmonic(), InteractionSpec::none(), 1.0);
  const ValidationReport open = validate_model(loose);
  CHECK_FALSE(open.confined);
  CHECK(open.confinement_margin == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sampled transform of a gaussian reproduces its integral at zero frequency") {
  const Grid g(1, 2.5, 201);
  const Field t = sampled_kernel_transform(g, InteractionSpec::gaussian(1.0, 1.0));
  CHECK(t[0] == Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(t.minCoeff() >= -1e-10);
}

TEST_CASE("validated kernels give a nonnegative form on random nonnegative fields") {
  const Grid g(1, 2.5, 101);
  const KernelTable k(g, InteractionSpec::exponential(0.7, 0.5));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 200; ++c) {
    Field f(101);
    for (Eigen::Index i = 0; i < 101; ++i) f[i] = u(rng) < 0.3 ? 0.0 : u(rng);
    const double l1 = f.sum() * g.weight();
    CHECK(k.quadratic_form(f, f) >= -1e-10 * l1 * l1);
  }
}

TEST_CASE("resolution rule: odd counts resolving both sqrt(hbar) and the Fermi wavelength") {
  const ResolutionRule rule;
  for (double hbar : {0.2, 0.05, 0.01}) {
    const std::size_t n = rule.points_for(6.0, hbar, 1.0);
    CHECK(n % 2 == 1);
    const double dx = 12.0 / static_cast<double>(n - 1);
    CHECK(dx <= std::sqrt(hbar) / 4.0 + 1e-15);
    CHECK(dx <= hbar / 8.0 + 1e-15);
  }
  const Grid g(1, 3.0, 301);
  CHECK(fermi_momentum(PotentialSpec::harmonic(), g, 1.0) == Approx(1.0));
  CHECK(fermi_momentum(PotentialSpec::harmonic(), g, 5.0) == Approx(std::sqrt(5.0)));
}

TEST_CASE("config parsing is strict") {
  const nlohmann::json base = {{"grid", {{"dim", 1}, {"half_width", 2.5}}},
                               {"chemical_potential", 1.0},
                               {"potential", {{"kind", "harmonic"}}},
                               {"interaction", {{"kind", "gaussian"}, {"a", 1.0}, {"sigma", 1.0}}}};
  const RunConfig cfg = parse_run_config(base);
  CHECK(cfg.model.half_width == Approx(2.5));
  CHECK(cfg.model.interaction.kind == InteractionSpec::Kind::gaussian);

  nlohmann::json typo = base;
  typo["scf"] = {{"tol_energyy", 1e-9}};
  CHECK_THROWS_AS(parse_run_config(typo), ConfigError);
  nlohmann::json missing = base;
  missing.erase("chemical_potential");
  CHECK_THROWS_AS(parse_run_config(missing), ConfigError);
  nlohmann::json kind = base;
  kind["potential"]["kind"] = "cubic";
  CHECK_THROWS_AS(parse_run_config(kind), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/weyl.json"), ConfigError);
}

TEST_CASE("tabulated potentials load relative to the config file") {
  const auto dir = std::filesystem::temp_directory_path() / "weyl_lattice_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "v.txt") << "# x V\n-3 9\n0 0\n3 9\n";
  std::ofstream(dir / "cfg.json") << R"({"grid": {"dim": 1, "half_width": 3}, "chemical_potential": 1,
    "potential": {"kind": "tabulated", "file": "v.txt"}})";
  const RunConfig cfg = load_run_config(dir / "cfg.json");
  CHECK(cfg.model.potential({1.5, 0.0}, 1) == Approx(4.5));
  std::filesystem::remove_all(dir);
}
