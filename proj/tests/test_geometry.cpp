#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spectralgap/error.hpp"
#include "spectralgap/geometry.hpp"
#include "support.hpp"

using namespace spectralgap;
using geometry::Domain;
using geometry::Junction;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form cap areas/volumes of depth eps.
double cap_closed_form(double eps, int n) {
  if (n == 2) return 2.0 * std::asin(std::sqrt(0.5 * eps)) - (1.0 - eps) * std::sqrt(2.0 * eps - eps * eps);
  return kPi * eps * eps * (3.0 - eps) / 3.0;
}

struct McEstimate {
  double value;
  double stderr_;
};

template <class Inside>
McEstimate qmc_volume(const std::vector<double>& lo, const std::vector<double>& hi, long samples, Inside inside) {
  support::Kronecker seq(static_cast<int>(lo.size()));
  double box = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) box *= hi[i] - lo[i];
  std::vector<double> x(lo.size());
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    const auto& u = seq.next();
    for (std::size_t i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u[i];
    hits += inside(x) ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / samples;
  return {box * p, box * std::sqrt(p * (1.0 - p) / samples)};
}

}  // namespace

TEST_CASE("unit ball constants") {
  CHECK(geometry::unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(geometry::unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(geometry::unit_sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(geometry::unit_sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  for (int n = 2; n <= 6; ++n)
    CHECK(geometry::unit_sphere_area(n) == doctest::Approx(n * geometry::unit_ball_volume(n)).epsilon(1e-14));
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(Domain::ball(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Domain::ball(2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Domain::dumbbell(2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Domain::dumbbell(2, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Domain::half_dumbbell(3, -0.1), InvalidArgument);
  CHECK_THROWS_AS(Domain(geometry::TwoBalls{1.0, 2.0}, 2), InvalidArgument);
  CHECK_NOTHROW(Domain(geometry::TwoBalls{1.0, 2.0001}, 2));
  CHECK_THROWS_AS(Domain::disjoint_union({Domain::ball({0.0, 0.0}, 1.0), Domain::ball({1.5, 0.0}, 1.0)}),
                  InvalidArgument);
  CHECK_THROWS_AS(Domain::scaled(0.0, Domain::ball(2)), InvalidArgument);
  CHECK_THROWS_AS(Domain::box({0.0, 1.0}, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("contains examples") {
  const auto d = Domain::dumbbell(2, 0.1);
  const std::vector<double> centre{0.9, 0.0};
  const std::vector<double> origin{0.0, 0.0};
  CHECK(geometry::contains(d, centre));
  CHECK_FALSE(geometry::contains(d, origin));
  CHECK(geometry::contains(d, origin, Junction::kIncluded));
  const std::vector<double> p{0.5, 0.5};
  CHECK(geometry::contains(Domain::ball(2), p));
  const std::vector<double> boundary{1.0, 0.0};
  CHECK_FALSE(geometry::contains(Domain::ball(2), boundary));
  const std::vector<double> wrong_dim{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(geometry::contains(Domain::ball(2), wrong_dim), InvalidArgument);
  // Junction disk edge: |x2| just below / above sqrt(2 eps - eps^2).
  const double a = std::sqrt(0.19);
  const std::vector<double> inside{0.0, a * 0.999};
  const std::vector<double> outside{0.0, a * 1.001};
  CHECK(geometry::contains(d, inside, Junction::kIncluded));
  CHECK_FALSE(geometry::contains(d, outside, Junction::kIncluded));
  // Half dumbbell keeps only x1 > 0.
  const auto half = Domain::half_dumbbell(2, 0.1);
  const std::vector<double> left{-0.9, 0.0};
  CHECK(geometry::contains(half, centre));
  CHECK_FALSE(geometry::contains(half, left));
  CHECK(geometry::contains(d, left));
}

TEST_CASE("measure examples") {
  CHECK(geometry::measure(Domain::ball(2)) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(geometry::measure(Domain::ball(3, 2.0)) == doctest::Approx(32.0 * kPi / 3.0).epsilon(1e-14));
  CHECK(geometry::measure(Domain::two_balls(2)) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(geometry::measure(Domain::dumbbell(2, 1e-9)) == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(geometry::measure(Domain::box({0.0, 0.0}, {2.0, 3.0})) == doctest::Approx(6.0));
  CHECK(geometry::measure(Domain::ellipsoid({0.0, 0.0}, {2.0, 0.5})) == doctest::Approx(kPi));
  CHECK(geometry::measure(Domain::half_dumbbell(2, 0.1)) ==
        doctest::Approx(0.5 * geometry::measure(Domain::dumbbell(2, 0.1))).epsilon(1e-14));
}

TEST_CASE("cap volume against closed forms") {
  for (int n : {2, 3})
    for (double eps : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.3, 0.7, 0.99}) {
      CAPTURE(n);
      CAPTURE(eps);
      CHECK(support::rel_diff(geometry::cap_volume(eps, n), cap_closed_form(eps, n)) < 1e-10);
    }
}

TEST_CASE("dumbbell measure against a quasi-Monte Carlo oracle") {
  const auto d = Domain::dumbbell(2, 0.1);
  const auto mc = qmc_volume({-2.0, -1.0}, {2.0, 1.0}, 10'000'000,
                             [&](const std::vector<double>& x) { return geometry::contains(d, x); });
  const double exact = geometry::measure(d);
  CAPTURE(mc.value);
  CAPTURE(exact);
  CHECK(std::abs(mc.value - exact) <= 3.0 * mc.stderr_);
}

TEST_CASE("cone volume") {
  CHECK(geometry::cone_volume(0.1, 2) == doctest::Approx(0.19).epsilon(1e-14));
  CHECK(geometry::cone_volume(1e-12, 2) < 1e-11);
  CHECK(geometry::cone_volume(0.1, 3) == doctest::Approx(kPi / 3.0 * std::pow(0.19, 1.5)).epsilon(1e-14));
  const geometry::ConeRegion cone(0.1);
  CHECK(cone.apex_offset() == doctest::Approx(std::sqrt(0.19)));
  const double a = cone.apex_offset();
  const auto mc = qmc_volume({0.0, -a}, {a, a}, 10'000'000,
                             [&](const std::vector<double>& x) { return cone.contains(x); });
  CHECK(std::abs(mc.value - geometry::cone_volume(0.1, 2)) <= 3.0 * mc.stderr_);
  const std::vector<double> inside{0.1, 0.1};
  const std::vector<double> left{-0.01, 0.0};
  const std::vector<double> beyond{0.3, 0.2};
  CHECK(cone.contains(inside));
  CHECK_FALSE(cone.contains(left));
  CHECK_FALSE(cone.contains(beyond));
  CHECK(cone.height_function(inside) == doctest::Approx(a - 0.2));
  CHECK_THROWS_AS(geometry::ConeRegion(1.0), InvalidArgument);
}

TEST_CASE("rescale to unit measure") {
  auto r = geometry::rescale_to_unit_measure(Domain::ball(2));
  CHECK(r.factor == doctest::Approx(1.0).epsilon(1e-15));
  for (int n : {2, 3}) {
    r = geometry::rescale_to_unit_measure(Domain::two_balls(n));
    CHECK(r.factor == doctest::Approx(std::pow(2.0, -1.0 / n)).epsilon(1e-14));
    CHECK(geometry::measure(r.domain) == doctest::Approx(geometry::unit_ball_volume(n)).epsilon(1e-10));
  }
  const auto d = Domain::dumbbell(2, 0.05);
  r = geometry::rescale_to_unit_measure(d);
  const double oracle = 2.0 * (kPi - cap_closed_form(0.05, 2));
  CHECK(r.factor == doctest::Approx(std::sqrt(kPi / oracle)).epsilon(1e-12));
  CHECK(geometry::measure(r.domain) == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(std::holds_alternative<geometry::Scaled>(r.domain.shape()));
}

TEST_CASE("property: scaled membership and measure, 1000 samples") {
  std::mt19937_64 rng(support::kSeed);
  std::uniform_real_distribution<double> ut(0.2, 3.0), ux(-4.0, 4.0), ue(0.01, 0.5);
  int failures = 0;
  for (int s = 0; s < 1000; ++s) {
    const double t = ut(rng);
    const int n = s % 2 == 0 ? 2 : 3;
    const auto inner = s % 3 == 0 ? Domain::dumbbell(n, ue(rng)) : (s % 3 == 1 ? Domain::two_balls(n) : Domain::ball(n));
    const auto scaled = Domain::scaled(t, inner);
    std::vector<double> x(n), xt(n);
    for (int i = 0; i < n; ++i) {
      x[i] = ux(rng);
      xt[i] = x[i] / t;
    }
    if (geometry::contains(scaled, x) != geometry::contains(inner, xt)) ++failures;
    if (support::rel_diff(geometry::measure(scaled), std::pow(t, n) * geometry::measure(inner)) > 1e-9) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("property: dumbbell measure decreases in eps with an eps^{(N+1)/2} deficit") {
  for (int n : {2, 3}) {
    double previous = geometry::measure(Domain::dumbbell(n, 0.01));
    for (int k = 2; k <= 30; ++k) {
      const double m = geometry::measure(Domain::dumbbell(n, 0.01 * k));
      CHECK(m < previous);
      previous = m;
    }
    double lo = 1e300, hi = 0.0;
    for (double eps = 1e-3; eps <= 0.1 + 1e-12; eps *= 1.2) {
      const double scaled = (2.0 * geometry::unit_ball_volume(n) - geometry::measure(Domain::dumbbell(n, eps))) /
                            std::pow(eps, 0.5 * (n + 1));
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    CAPTURE(n);
    CHECK(lo > 0.0);
    CHECK(hi / lo < 2.0);
  }
}

TEST_CASE("mirror symmetry and bounding data") {
  std::mt19937_64 rng(support::kSeed + 1);
  std::uniform_real_distribution<double> u(-2.2, 2.2);
  const auto d = Domain::dumbbell(2, 0.2);
  for (int s = 0; s < 1000; ++s) {
    const std::vector<double> x{u(rng), u(rng)};
    const std::vector<double> m{-x[0], x[1]};
    REQUIRE(geometry::contains(d, x) == geometry::contains(d, m));
  }
  const auto bb = geometry::bounding_box(d);
  CHECK(bb.lower[0] <= -1.8);
  CHECK(bb.upper[0] >= 1.8);
  const auto ball = geometry::bounding_ball(Domain::ball({1.0, 2.0}, 0.5));
  CHECK(ball.radius == doctest::Approx(0.5));
  CHECK(ball.center[1] == doctest::Approx(2.0));
}

TEST_CASE("json round trip") {
  const std::vector<Domain> domains{
      Domain::ball(2),
      Domain::ball({1.0, -1.0, 0.5}, 2.0),
      Domain::two_balls(3, 0.5),
      Domain::dumbbell(2, 0.1),
      Domain::half_dumbbell(3, 0.2),
      Domain::box({0.0, 0.0}, {2.0, 1.0}),
      Domain::ellipsoid({0.0, 0.0}, {2.0, 0.5}),
      Domain::scaled(0.5, Domain::dumbbell(2, 0.3)),
      Domain::disjoint_union({Domain::ball({-2.0, 0.0}, 1.0), Domain::ball({2.0, 0.0}, 0.5)}),
  };
  for (const auto& d : domains) {
    const auto doc = geometry::to_json(d);
    const auto back = geometry::domain_from_json(doc);
    CHECK(geometry::to_json(back) == doc);
    CHECK(geometry::measure(back) == doctest::Approx(geometry::measure(d)).epsilon(1e-14));
  }
  CHECK(geometry::to_json(Domain::dumbbell(2, 0.1))["kind"] == "dumbbell");
  CHECK_THROWS_AS(geometry::domain_from_json(nlohmann::json{{"kind", "torus"}, {"N", 2}}), InvalidArgument);
  CHECK_THROWS_AS(geometry::domain_from_json(nlohmann::json::parse(R"({"kind":"dumbbell","N":2})")),
                  InvalidArgument);
  CHECK_THROWS_AS(geometry::domain_from_json(nlohmann::json::parse(R"({"kind":"dumbbell","N":2,"params":{"epsilon":1.5}})")),
                  InvalidArgument);
}
