#include "spectralgap/analytic.hpp"

#include <cmath>
#include <numbers>

#include "spectralgap/error.hpp"
#include "spectralgap/geometry.hpp"

namespace spectralgap::analytic {

namespace {

constexpr double kSeriesLimit = 8.0;

bool is_integer(double nu) { return nu == std::floor(nu); }
bool is_half_integer(double nu) { return is_integer(nu - 0.5); }

// sum_k (-x^2/4)^k / (k! Gamma(k + nu + 1)); J_nu(x) = (x/2)^nu * this.
double ascending_series(double nu, double x) {
  const double q = -0.25 * x * x;
  double term = 1.0 / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's backward recurrence normalised by J0 + 2 sum J_{2k} = 1.
double integer_order_backward(int n, double x) {
  const int start = 2 * ((std::max(n, static_cast<int>(x)) + 40 + static_cast<int>(10.0 * std::cbrt(x))) / 2);
  double next = 0.0;
  double current = 1e-30;
  double result = 0.0;
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = 2.0 * k / x * current - next;
    next = current;
    current = prev;
    if (k - 1 == n) result = current;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
  }
  return result / norm;
}

// Spherical Bessel j_n by downward recurrence, normalised against j0 or j1.
double spherical_backward(int n, double x) {
  const int start = std::max(n, static_cast<int>(x)) + 40 + static_cast<int>(10.0 * std::cbrt(x));
  double next = 0.0;
  double current = 1e-30;
  double jn = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = (2.0 * k + 1.0) / x * current - next;
    next = current;
    current = prev;
    if (k == n) jn = next;
    if (k == 1) j1 = next;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      jn *= 1e-250;
      j1 *= 1e-250;
    }
  }
  j0 = current;
  if (n == 0) jn = j0;
  const double exact0 = std::sin(x) / x;
  const double exact1 = std::sin(x) / (x * x) - std::cos(x) / x;
  return std::abs(exact0) > std::abs(exact1) ? jn * exact0 / j0 : jn * exact1 / j1;
}

}  // namespace

double bessel_j(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("bessel_j requires nu >= 0 and x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= kSeriesLimit) return std::pow(0.5 * x, nu) * ascending_series(nu, x);
  if (is_integer(nu)) return integer_order_backward(static_cast<int>(nu), x);
  if (is_half_integer(nu)) {
    const int n = static_cast<int>(nu - 0.5);
    return std::sqrt(2.0 * x / std::numbers::pi) * spherical_backward(n, x);
  }
  throw InvalidArgument("bessel_j: non-integer, non-half-integer order supported only for x <= 8");
}

double bessel_j_scaled(double nu, double x) {
  if (!(x >= 0.0)) throw InvalidArgument("bessel_j_scaled requires x >= 0");
  if (x <= kSeriesLimit) return std::pow(0.5, nu) * ascending_series(nu, x);
  return bessel_j(nu, x) / std::pow(x, nu);
}

double bessel_zero(double nu, int k) {
  if (k < 1) throw InvalidArgument("bessel_zero index must be >= 1");
  if (!(nu >= 0.0)) throw InvalidArgument("bessel_zero requires nu >= 0");
  constexpr double kStep = 0.1;
  const double limit = nu + 4.0 * k + 10.0 + 4.0 * k * std::numbers::pi;
  double a = nu + 0.1;
  double fa = bessel_j(nu, a);
  int found = 0;
  while (a < limit) {
    const double b = a + kStep;
    const double fb = bessel_j(nu, b);
    if (fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      if (++found == k) {
        if (fb == 0.0) return b;
        // Safeguarded Newton inside the bracket [lo, hi].
        double lo = a;
        double hi = b;
        double flo = fa;
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
          const double fx = bessel_j(nu, x);
          if (fx == 0.0) return x;
          if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
          } else {
            hi = x;
          }
          const double slope = nu / x * fx - bessel_j(nu + 1.0, x);
          double next = x - fx / slope;
          if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
          if (std::abs(next - x) < 1e-15 * x || hi - lo < 4e-16 * x) return next;
          x = next;
        }
        throw ConvergenceFailure("bessel_zero refinement did not converge");
      }
    }
    a = b;
    fa = fb;
  }
  throw ConvergenceFailure("bessel_zero: no bracket found for the requested zero");
}

BallSpectrum ball_spectrum(int dimension) {
  if (dimension != 2 && dimension != 3) throw InvalidArgument("ball_spectrum supports N in {2, 3}");
  BallSpectrum s;
  s.dimension = dimension;
  s.nu = 0.5 * dimension - 1.0;
  s.j1 = bessel_zero(s.nu, 1);
  s.j2 = bessel_zero(s.nu + 1.0, 1);
  s.lambda1 = s.j1 * s.j1;
  s.lambda2 = s.j2 * s.j2;
  // int_0^1 r J_nu(j r)^2 dr = J_{nu+1}(j)^2 / 2 at a zero j of J_nu.
  const double jnext = bessel_j(s.nu + 1.0, s.j1);
  s.norm_const = std::sqrt(2.0 / (geometry::unit_sphere_area(dimension) * jnext * jnext));
  s.kappa = std::abs(ball_eigenfunction(s, 1.0).derivative);
  return s;
}

std::pair<double, double> theta_spectrum(int dimension) {
  const auto ball = ball_spectrum(dimension);
  const double value = std::pow(2.0, 2.0 / dimension) * ball.lambda1;
  return {value, value};
}

double rescale_eigenvalue(double lambda, double t) {
  if (!(t > 0.0)) throw InvalidArgument("rescale factor must be positive");
  return lambda / (t * t);
}

RadialSample ball_eigenfunction_unchecked(const BallSpectrum& s, double r) {
  r = std::min(r, 1.0);
  const double x = s.j1 * r;
  const double jpow = std::pow(s.j1, s.nu);
  // d/dr [r^{-nu} J_nu(j r)] = -j r^{-nu} J_{nu+1}(j r)
  return RadialSample{s.norm_const * jpow * bessel_j_scaled(s.nu, x),
                      -s.norm_const * jpow * s.j1 * x * bessel_j_scaled(s.nu + 1.0, x)};
}

RadialSample ball_eigenfunction(const BallSpectrum& s, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("ball_eigenfunction radius must lie in [0, 1]");
  return ball_eigenfunction_unchecked(s, r);
}

}  // namespace spectralgap::analytic
