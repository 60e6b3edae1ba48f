#pragma once

// Explicit test functions on the dumbbell and their Rayleigh quotients.
//
// Lemma1Function: the first eigenfunction u of the unit ball B_eps centred
// at (1 - eps, 0), raised by (kappa/2)(sqrt(2 eps - eps^2) - x1 - |x'|)
// inside the junction cone and extended evenly across {x1 = 0}. Its
// quotient bounds lambda1 of the dumbbell from above.
//
// Lemma2Function: u times the cutoff xi = clamp(x1/eps, 0, 1) on the right
// half, zero on the left half. Its quotient bounds lambda1 of the half
// dumbbell, hence lambda2 of the dumbbell, from above.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "spectralgap/analytic.hpp"
#include "spectralgap/eigensolve.hpp"
#include "spectralgap/geometry.hpp"
#include "spectralgap/quadrature.hpp"

namespace spectralgap::testfn {

struct ValueGradient {
  double value = 0.0;
  std::array<double, 3> gradient{};
  /// False on the cone axis x' = 0, where the cone term has no gradient.
  bool gradient_defined = true;
};

class Lemma1Function {
public:
  Lemma1Function(double epsilon, int dimension);

  double epsilon() const { return epsilon_; }
  int dimension() const { return ball_.dimension; }
  const analytic::BallSpectrum& ball() const { return ball_; }
  const geometry::ConeRegion& cone() const { return cone_; }
  double kappa() const { return ball_.kappa; }

  /// Value and gradient at x in the (connected) dumbbell; throws
  /// InvalidArgument outside it.
  ValueGradient evaluate(std::span<const double> x) const;

  /// The uncorrected shifted-ball eigenfunction u at x (x1 >= 0 side).
  ValueGradient ball_term(std::span<const double> x) const;

private:
  double epsilon_;
  analytic::BallSpectrum ball_;
  geometry::ConeRegion cone_;
  geometry::Domain domain_;
};

class Lemma2Function {
public:
  Lemma2Function(double epsilon, int dimension);

  double epsilon() const { return epsilon_; }
  int dimension() const { return ball_.dimension; }
  const analytic::BallSpectrum& ball() const { return ball_; }
  /// Lipschitz constant L with |grad xi| <= L / eps.
  double lipschitz() const { return 1.0; }

  double cutoff(std::span<const double> x) const;
  std::array<double, 3> cutoff_gradient(std::span<const double> x) const;

  /// phi = u * xi on the right half, 0 on the left half.
  ValueGradient evaluate(std::span<const double> x) const;

private:
  double epsilon_;
  analytic::BallSpectrum ball_;
  geometry::Domain domain_;
};

struct QuotientResult {
  double quotient = 0.0;
  double numerator = 0.0;    ///< integral of |grad f|^2
  double denominator = 0.0;  ///< integral of f^2
  double error = 0.0;        ///< absolute error estimate on the quotient
  int evaluations = 0;
  double relative_error() const { return error / quotient; }
};

struct Lemma1Result : QuotientResult {
  double deficit = 0.0;  ///< lambda1(B) - quotient
};

struct Lemma2Result : QuotientResult {
  double excess = 0.0;  ///< quotient - lambda1(B)
};

/// Default quadrature for the lemma quotients (relative 1e-8 on the quotient
/// is met with a wide margin).
quad::Config lemma_quadrature();

/// Quotient of the Lemma1Function over the dumbbell (computed on the right
/// half, by symmetry). Requires 0 < eps <= 0.3 and N in {2, 3}.
Lemma1Result lemma1_rayleigh(double epsilon, int dimension, const quad::Config& config = lemma_quadrature());

/// Quotient of u * xi over the right half, from the expanded integrand
/// |grad u|^2 xi^2 + |grad xi|^2 u^2 + 2 u xi <grad u, grad xi>.
Lemma2Result lemma2_rayleigh(double epsilon, int dimension, const quad::Config& config = lemma_quadrature());

/// Any field given by value and gradient at a point.
using Field = std::function<ValueGradient(std::span<const double>)>;

/// Quotient of an arbitrary field over a domain, by nested adaptive
/// quadrature in polar charts (one chart per star-shaped piece). The error
/// estimate assumes the field is smooth inside each chart; kinks or jumps of
/// the gradient off the chart breaks make it optimistic.
QuotientResult rayleigh_quotient(const geometry::Domain& domain, const Field& field, const quad::Config& config);

struct OddExtensionReport {
  double epsilon = 0.0;
  double lambda2_dumbbell = 0.0;  ///< extrapolated
  double lambda1_half = 0.0;      ///< extrapolated
  double gap = 0.0;               ///< lambda2_dumbbell - lambda1_half
  double combined_tolerance = 0.0;
  bool inequality_holds = false;  ///< gap <= 2 * combined_tolerance
  double odd_correlation = 0.0;   ///< -<v2, v2 o mirror> / |v2|^2 on the finest grid
  eigensolve::LadderResult dumbbell;
  eigensolve::LadderResult half;
};

/// Grid check that lambda2 of the dumbbell does not exceed lambda1 of its
/// right half, and that the second dumbbell eigenvector is odd in x1.
OddExtensionReport odd_extension_check(double epsilon, const eigensolve::LadderOptions& options);

/// Mirror correlation -sum v(i,j) v(-i,j) / sum v^2 over a grid symmetric in x1.
double odd_correlation(const discretize::Grid2D& grid, const Eigen::VectorXd& v);

}  // namespace spectralgap::testfn
