#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectralgap/quadrature.hpp"

using namespace spectralgap;

namespace {
constexpr double kPi = std::numbers::pi;
const quad::Config kTight{1e-12, 1e-15, 4000};
}  // namespace

TEST_CASE("polynomials are integrated exactly on one segment") {
  for (int p = 0; p <= 20; ++p) {
    const auto r = quad::integrate_scalar([p](double x) { return std::pow(x, p); }, 0.0, 1.0, kTight);
    CHECK(r.value[0] == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    CHECK(r.converged);
  }
}

TEST_CASE("smooth and oscillatory integrands") {
  auto r = quad::integrate_scalar([](double x) { return std::sin(x); }, 0.0, kPi, kTight);
  CHECK(r.value[0] == doctest::Approx(2.0).epsilon(1e-13));
  r = quad::integrate_scalar([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0, kTight);
  CHECK(r.value[0] == doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-11));
  r = quad::integrate_scalar([](double x) { return std::exp(-x * x); }, -6.0, 6.0, kTight);
  CHECK(r.value[0] == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
  CHECK(r.error[0] < 1e-10);
}

TEST_CASE("endpoint singularity and kinks") {
  auto r = quad::integrate_scalar([](double x) { return std::sqrt(x); }, 0.0, 1.0, kTight);
  CHECK(r.value[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  r = quad::integrate_scalar([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, kTight, {0.3});
  CHECK(r.value[0] == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
  r = quad::integrate_scalar([](double x) { return x < 0.5 ? 0.0 : 1.0; }, 0.0, 1.0, kTight, {0.5, 7.0});
  CHECK(r.value[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("vector integrands share nodes") {
  const auto r = quad::integrate<3>(
      [](double x) { return std::array<double, 3>{1.0, x, x * x}; }, -1.0, 2.0, kTight);
  CHECK(r.value[0] == doctest::Approx(3.0));
  CHECK(r.value[1] == doctest::Approx(1.5));
  CHECK(r.value[2] == doctest::Approx(3.0));
}

TEST_CASE("two-dimensional nested integral: disc area and second moment") {
  const auto r = quad::integrate_2d<2>(
      [](double x, double y) { return std::array<double, 2>{1.0, x * x + y * y}; }, -1.0, 1.0,
      [](double x) { return -std::sqrt(std::max(0.0, 1.0 - x * x)); },
      [](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); }, kTight, kTight);
  CHECK(r.value[0] == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(r.value[1] == doctest::Approx(kPi / 2.0).epsilon(1e-10));
}

TEST_CASE("interval cap reports non-convergence") {
  const auto r = quad::integrate_scalar([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0.0, 1.0,
                                        quad::Config{1e-14, 0.0, 3});
  CHECK_FALSE(r.converged);
}

TEST_CASE("empty interval") {
  auto r = quad::integrate_scalar([](double) { return 1.0; }, 1.0, 1.0, kTight);
  CHECK(r.value[0] == 0.0);
}
