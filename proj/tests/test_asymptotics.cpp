#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "spectralgap/analytic.hpp"
#include "spectralgap/asymptotics.hpp"
#include "spectralgap/error.hpp"
#include "support.hpp"

using namespace spectralgap;
using asymptotics::RatioCurve;
using asymptotics::RatioPoint;

namespace {

std::vector<std::pair<double, double>> tabulate(const std::vector<double>& eps, double (*f)(double)) {
  std::vector<std::pair<double, double>> out;
  for (double e : eps) out.emplace_back(e, f(e));
  return out;
}

RatioCurve synthetic(double (*f)(double)) {
  RatioCurve c;
  for (double e : asymptotics::default_eps_grid()) c.bound_path.push_back({e, f(e), 1.0, f(e), true});
  return c;
}

const asymptotics::Check& find(const asymptotics::Verdict& v, const std::string& name) {
  const auto it = std::find_if(v.checks.begin(), v.checks.end(), [&](const auto& c) { return c.name == name; });
  REQUIRE(it != v.checks.end());
  return *it;
}

}  // namespace

TEST_CASE("fit_slope: exact and perturbed power laws") {
  const auto grid = asymptotics::default_eps_grid();
  const auto exact = asymptotics::fit_slope(tabulate(grid, [](double e) { return 3 * e * e; }), {0.005, 0.2});
  CHECK(exact.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(exact.prefactor == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(exact.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact.n_points == 12);
  CHECK(exact.window_min == 0.005);
  CHECK(exact.window_max == 0.2);

  const auto perturbed = asymptotics::fit_slope(tabulate(grid, [](double e) { return e * (1 + e); }), {0.005, 0.05});
  CHECK(perturbed.exponent >= 1.0);
  CHECK(perturbed.exponent <= 1.05);
  CHECK(perturbed.r_squared >= 0.0);
  CHECK(perturbed.r_squared <= 1.0);
}

TEST_CASE("fit_slope: scale equivariance and reordering") {
  const auto grid = asymptotics::default_eps_grid();
  std::mt19937_64 rng(support::kSeed);
  std::uniform_real_distribution<double> noise(0.9, 1.1), scale(0.01, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::pair<double, double>> pairs;
    for (double e : grid) pairs.emplace_back(e, std::sqrt(e) * noise(rng));
    const auto base = asymptotics::fit_slope(pairs, {0.005, 0.2});
    const double c = scale(rng);
    auto scaled = pairs;
    for (auto& p : scaled) p.second *= c;
    const auto s = asymptotics::fit_slope(scaled, {0.005, 0.2});
    REQUIRE(s.exponent == doctest::Approx(base.exponent).epsilon(1e-10).scale(1.0));
    REQUIRE(s.prefactor == doctest::Approx(c * base.prefactor).epsilon(1e-10));
    auto shuffled = pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto r = asymptotics::fit_slope(shuffled, {0.005, 0.2});
    REQUIRE(r.exponent == doctest::Approx(base.exponent).epsilon(1e-12).scale(1.0));
    REQUIRE(r.r_squared >= 0.0);
    REQUIRE(r.r_squared <= 1.0);
  }
}

TEST_CASE("fit_slope: errors") {
  std::vector<std::pair<double, double>> pairs{{0.01, 1}, {0.02, 2}, {0.03, -1}, {0.04, 4}, {0.05, 5}};
  try {
    asymptotics::fit_slope(pairs, {0.0, 1.0});
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("0.03") != std::string::npos);
  }
  pairs[2].second = 3;
  CHECK_NOTHROW(asymptotics::fit_slope(pairs, {0.0, 1.0}));
  CHECK_THROWS_AS(asymptotics::fit_slope(pairs, {0.0, 0.035}), InvalidArgument);
}

TEST_CASE("eps grids") {
  const auto g = asymptotics::default_eps_grid();
  REQUIRE(g.size() == 12);
  CHECK(g.front() == 0.005);
  CHECK(g[1] == doctest::Approx(0.00707106781187));
  CHECK(g[2] == doctest::Approx(0.01));
  CHECK(g.back() == 0.2);
  for (std::size_t i = 0; i + 2 < g.size(); ++i) CHECK(g[i + 1] / g[i] == doctest::Approx(std::sqrt(2.0)));
  CHECK(asymptotics::default_eps_grid(0.3).back() == 0.3);
  CHECK_THROWS_AS(asymptotics::default_eps_grid(0.5), InvalidArgument);
  CHECK_NOTHROW(asymptotics::validate_eps_grid(g));
  CHECK_THROWS_AS(asymptotics::validate_eps_grid({}), InvalidArgument);
  CHECK_THROWS_AS(asymptotics::validate_eps_grid({0.1, 0.05}), InvalidArgument);
  CHECK_THROWS_AS(asymptotics::validate_eps_grid({0.1, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(asymptotics::validate_eps_grid({0.0, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(asymptotics::validate_eps_grid({0.1, 0.31}), InvalidArgument);
}

TEST_CASE("verdict on synthetic curves") {
  const auto root = asymptotics::verify_theorem(synthetic([](double e) { return std::sqrt(e); }));
  CHECK(root.pass);
  CHECK(root.fit.exponent == doctest::Approx(0.5));
  for (const auto& c : root.checks) CHECK(c.pass);

  const auto flat = asymptotics::verify_theorem(synthetic([](double) { return 0.7; }));
  CHECK_FALSE(flat.pass);
  CHECK(find(flat, "monotone_decrease").pass);
  CHECK_FALSE(find(flat, "decay").pass);
  CHECK_FALSE(find(flat, "exponent").pass);

  auto wobble = synthetic([](double e) { return std::sqrt(e); });
  std::swap(wobble.bound_path[3].ratio, wobble.bound_path[4].ratio);
  CHECK(asymptotics::verify_theorem(wobble).pass);
  std::swap(wobble.bound_path[7].ratio, wobble.bound_path[8].ratio);
  const auto twice = asymptotics::verify_theorem(wobble);
  CHECK_FALSE(twice.pass);
  CHECK_FALSE(find(twice, "monotone_decrease").pass);

  RatioCurve tiny = synthetic([](double e) { return e; });
  tiny.bound_path.resize(3);
  CHECK_THROWS_AS(asymptotics::verify_theorem(tiny), InvalidArgument);

  const auto j = asymptotics::to_json(root);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("checks").size() == 3);
  CHECK(j.at("checks")[0].contains("detail"));
  CHECK(j.at("data_csv_path").is_null());
}

TEST_CASE("ratio curve from lemma bounds") {
  for (int n : {2, 3}) {
    const auto records = asymptotics::bound_records(asymptotics::default_eps_grid(), n, testfn::lemma_quadrature());
    const auto curve = asymptotics::ratio_curve(records, n);
    REQUIRE(curve.bound_path.size() == 12);
    CHECK(curve.grid_path.empty());
    for (const auto& p : curve.bound_path) {
      CHECK(p.valid);
      CHECK(p.numerator >= 0.0);
      CHECK(p.denominator > 0.0);
      CHECK(p.ratio >= 0.0);
    }
    CHECK(curve.bound_path.front().ratio < curve.bound_path.back().ratio);
    const auto v = asymptotics::verify_theorem(curve);
    CHECK(v.pass);
    CHECK(v.fit.exponent >= 0.3);
  }
}

TEST_CASE("ratio CSV schema") {
  const auto curve = synthetic([](double e) { return e; });
  std::ostringstream out;
  asymptotics::write_ratio_csv(out, curve);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "path,epsilon,numerator,denominator,ratio,valid");
  std::getline(in, line);
  CHECK(line == "bound,0.005,0.005,1,0.005,1");
}

TEST_CASE("pipeline: grid path and consistency") {
  asymptotics::PipelineConfig cfg;
  cfg.grid_eps = {0.2};
  cfg.ladder.h_levels = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  const auto result = asymptotics::run_pipeline(cfg);
  CHECK(result.verdict.pass);
  REQUIRE(result.curve.grid_path.size() == 1);
  const auto& g = result.curve.grid_path.front();
  CHECK(g.epsilon == 0.2);
  CHECK(g.numerator >= 0.0);
  CHECK(g.ratio >= 0.0);
  REQUIRE(result.cross_checks.size() == 1);
  CHECK(result.cross_checks[0].lemma1_consistent);
  CHECK(result.cross_checks[0].lemma2_consistent);
  for (const auto& c : result.consistency) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  const auto j = asymptotics::to_json(result);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.contains("consistency"));
  CHECK(j.contains("fit"));

  asymptotics::PipelineConfig three;
  three.dimension = 3;
  three.grid_eps = {};
  CHECK(asymptotics::run_pipeline(three).verdict.pass);
}
