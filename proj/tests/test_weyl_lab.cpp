#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "weyl/errors.hpp"
#include "weyl/heat.hpp"
#include "weyl/report_io.hpp"
#include "weyl/sweep.hpp"

using namespace weyl;
using doctest::Approx;
using nlohmann::json;

namespace {

json free_model() {
  return {{"grid", {{"dim", 1}, {"half_width", 6.0}}},
          {"chemical_potential", 1.0},
          {"coupling", 0.0},
          {"potential", {{"kind", "harmonic"}}},
          {"interaction", {{"kind", "none"}}},
          {"thomas_fermi", {{"points", 2001}}}};
}

json free_plan() {
  return {{"model", free_model()}, {"hbar", {0.2, 0.1}}, {"solvers", {"rhf", "hf", "tf"}}, {"probes", {0.0, 1.5}}};
}

}  // namespace

TEST_CASE("sweep plans are validated") {
  CHECK_NOTHROW(parse_sweep_plan(free_plan()));
  json up = free_plan();
  up["hbar"] = {0.1, 0.2};
  CHECK_THROWS_AS(parse_sweep_plan(up), ConfigError);
  json neg = free_plan();
  neg["hbar"] = {0.1, -0.1};
  CHECK_THROWS_AS(parse_sweep_plan(neg), ConfigError);
  json solver = free_plan();
  solver["solvers"] = {"dft"};
  CHECK_THROWS_AS(parse_sweep_plan(solver), ConfigError);
  json key = free_plan();
  key["hbars"] = {0.1};
  CHECK_THROWS_AS(parse_sweep_plan(key), ConfigError);
  json nomodel = free_plan();
  nomodel.erase("model");
  CHECK_THROWS_AS(parse_sweep_plan(nomodel), ConfigError);

  const auto dir = std::filesystem::temp_directory_path() / "weyl_plan_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "m.json") << free_model().dump();
  json byfile = free_plan();
  byfile.erase("model");
  byfile["model_file"] = "m.json";
  std::ofstream(dir / "plan.json") << byfile.dump();
  CHECK(load_sweep_plan(dir / "plan.json").config.model.half_width == Approx(6.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("slopes, Richardson and the pointwise table") {
  CHECK(*loglog_slope({0.1, 0.05, 0.02}, {0.03, 0.0075, 0.0012}) == Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(loglog_slope({0.1}, {1.0}).has_value());
  CHECK(richardson_linear(0.002, 5.0 + 3.0 * 0.002, 0.001, 5.0 + 3.0 * 0.001) == Approx(5.0).epsilon(1e-13));

  const Grid g(1, 1.0, 3);
  const Density tf(g, Field::Constant(3, 0.5));
  const std::vector<std::pair<double, Density>> states{{0.1, Density(g, Field::Constant(3, 0.4))}};
  const auto rows = weyl_pointwise_table(states, {{0.0, 0.0}, {0.5, 0.0}}, tf);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].value == Approx(0.4));
  CHECK(rows[1].target == Approx(0.5));
  CHECK(rows[1].diff == Approx(0.1));
}

TEST_CASE("free sweep: Weyl counting, fixed TF targets and reproducible reports") {
  const SweepPlan plan = parse_sweep_plan(free_plan());
  const SweepSummary s = run_sweep(plan, 1);
  REQUIRE(s.records.size() == 2);
  CHECK(s.records[0].hbar > s.records[1].hbar);
  for (const auto& r : s.records) {
    REQUIRE(r.rhf);
    // Levels hbar (2k + 1) <= 1 are filled: hbar tr = hbar * ceil-count, within hbar of 1/2.
    CHECK(std::abs(r.rhf->scaled_trace - 0.5) <= r.hbar);
    CHECK(r.rhf->probe_density.size() == plan.probes.size());
    CHECK(r.notes.empty());
  }
  REQUIRE(s.tf);
  CHECK(s.tf->mass == Approx(0.5).epsilon(1e-3));
  CHECK(s.guard.has_value());
  CHECK(s.trace_bound_constant.has_value());

  std::ostringstream a, b;
  write_records_csv(a, plan, s);
  write_records_csv(b, plan, run_sweep(plan, 2));
  CHECK(a.str() == b.str());
  std::istringstream lines(a.str());
  std::string header;
  std::getline(lines, header);
  std::string joined;
  for (const auto& c : record_columns(plan)) joined += (joined.empty() ? "" : ",") + c;
  CHECK(header == joined);
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 2);

  const json j = summary_json(plan, s);
  CHECK(j["schema_version"] == schema_version);
  CHECK(j["records"].size() == 2);
  CHECK(j.dump() == summary_json(plan, s).dump());
}

TEST_CASE("heat report against the free kernel and the Mehler kernel") {
  HeatSettings settings;
  settings.times = {0.01, 0.005, 0.002, 0.001};
  const HeatReport free = heat_tauberian_report(PotentialSpec::harmonic(0.0), 0.0, 1, settings);
  for (const auto& row : free.rows) CHECK(row.rel_error < 1e-2);

  const HeatReport osc = heat_tauberian_report(PotentialSpec::harmonic(1.0), 1.0, 1, settings);
  for (const auto& row : osc.rows) {
    // Mehler kernel, W = x^2 - 1 at x = 0: e * sqrt(2 sqrt(t) / sinh(2 sqrt(t))).
    const double s = 2.0 * std::sqrt(row.t);
    CHECK(row.value == Approx(std::exp(1.0) * std::sqrt(s / std::sinh(s))).epsilon(5e-4));
  }
  for (std::size_t k = 1; k < osc.rows.size(); ++k) CHECK(osc.rows[k].rel_error < osc.rows[k - 1].rel_error);
  REQUIRE(osc.limits.size() == 1);
  CHECK(osc.limits[0].rel_error < 2e-3);
}

TEST_CASE("numbers and plots") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")).empty());
  std::ostringstream svg;
  write_svg_plot(svg, "t", {{"a", {1.0, 2.0}, {1.0, 4.0}}}, true, true);
  CHECK(svg.str().find("<polyline") != std::string::npos);
}
