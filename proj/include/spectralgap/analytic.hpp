#pragma once

// Reference Dirichlet spectra of the unit ball and of two equal disjoint
// balls, built on Bessel functions of integer and half-integer order.

#include <utility>

namespace spectralgap::analytic {

/// J_nu(x) for nu >= 0, x >= 0. Integer and half-integer orders are
/// supported for all x; other orders only where the ascending series is
/// accurate (x <= 8).
double bessel_j(double nu, double x);

/// x^{-nu} J_nu(x), finite at x = 0.
double bessel_j_scaled(double nu, double x);

/// k-th positive zero of J_nu (k >= 1).
double bessel_zero(double nu, int k);

struct BallSpectrum {
  int dimension = 2;
  double nu = 0.0;          ///< N/2 - 1
  double j1 = 0.0;          ///< first zero of J_nu
  double j2 = 0.0;          ///< first zero of J_{nu+1}
  double lambda1 = 0.0;     ///< j1^2
  double lambda2 = 0.0;     ///< j2^2
  double norm_const = 0.0;  ///< u(r) = norm_const * r^{-nu} J_nu(j1 r) has unit L2 norm on B
  double kappa = 0.0;       ///< |u'(1)|
};

/// Unit-ball data for N in {2, 3}.
BallSpectrum ball_spectrum(int dimension);

/// (lambda1, lambda2) of two disjoint balls of total measure omega_N;
/// both equal 2^{2/N} lambda1(B).
std::pair<double, double> theta_spectrum(int dimension);

/// lambda(t * Omega) from lambda(Omega): lambda / t^2.
double rescale_eigenvalue(double lambda, double t);

struct RadialSample {
  double value = 0.0;
  double derivative = 0.0;  ///< d/dr
};

/// Unit-L2-norm first eigenfunction of the unit ball at radius r in [0, 1].
RadialSample ball_eigenfunction(const BallSpectrum& spectrum, double r);

/// Same as ball_eigenfunction without the range check; r slightly above 1
/// (roundoff at the sphere) is clamped to the boundary value.
RadialSample ball_eigenfunction_unchecked(const BallSpectrum& spectrum, double r);

}  // namespace spectralgap::analytic
