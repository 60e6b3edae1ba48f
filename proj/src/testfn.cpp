#include "spectralgap/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectralgap/error.hpp"

namespace spectralgap::testfn {

namespace {

using geometry::Junction;

constexpr double kPi = std::numbers::pi;

void check_lemma_args(double epsilon, int dimension) {
  if (!(epsilon > 0.0 && epsilon <= 0.3)) throw InvalidArgument("lemma quotients require 0 < eps <= 0.3");
  if (dimension != 2 && dimension != 3) throw InvalidArgument("lemma quotients support N in {2, 3}");
}

double transverse_norm(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

// u and grad u of the unit-ball eigenfunction centred at (centre1, 0, ...).
ValueGradient shifted_ball(const analytic::BallSpectrum& ball, double centre1, std::span<const double> x) {
  std::array<double, 3> d{};
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = x[i] - (i == 0 ? centre1 : 0.0);
    r2 += d[i] * d[i];
  }
  const double r = std::sqrt(r2);
  const auto s = analytic::ball_eigenfunction_unchecked(ball, r);
  ValueGradient out;
  out.value = s.value;
  if (r > 0.0)
    for (std::size_t i = 0; i < x.size(); ++i) out.gradient[i] = s.derivative * d[i] / r;
  return out;
}

// Angular weight for axisymmetric integrands in polar angle theta about e1.
double polar_weight(int dimension, double theta) {
  return dimension == 2 ? 2.0 : 2.0 * kPi * std::sin(theta);
}

// Weight for the transverse radius rho = |x'| in (x1, rho) coordinates.
double transverse_weight(int dimension, double rho) { return dimension == 2 ? 2.0 : 2.0 * kPi * rho; }

quad::Config inner_config(const quad::Config& outer) {
  quad::Config inner = outer;
  inner.rel_tol = outer.rel_tol * 0.1;
  inner.abs_tol = outer.abs_tol * 0.1;
  return inner;
}

// Integrals of [u^2, |grad u|^2] over B_eps cut by the plane {x1 = plane},
// polar coordinates about the ball centre (1 - eps, 0).
quad::Result<2> ball_cut_integrals(const analytic::BallSpectrum& ball, double epsilon, double plane,
                                   const quad::Config& config) {
  const int n = ball.dimension;
  const double depth = 1.0 - epsilon - plane;  // centre-to-plane distance
  auto radius = [depth](double theta) {
    const double c = std::cos(theta);
    return c < 0.0 ? std::min(1.0, depth / -c) : 1.0;
  };
  auto integrand = [&](double theta, double r) {
    const auto s = analytic::ball_eigenfunction_unchecked(ball, r);
    const double w = polar_weight(n, theta) * std::pow(r, n - 1);
    return std::array<double, 2>{w * s.value * s.value, w * s.derivative * s.derivative};
  };
  const double kink = kPi - std::acos(depth);
  return quad::integrate_2d<2>(
      integrand, 0.0, kPi, [](double) { return 0.0; }, radius, config, inner_config(config), {kink});
}

QuotientResult make_quotient(double numerator, double num_err, double denominator, double den_err, int evals) {
  if (!(denominator > 0.0)) throw InvalidArgument("rayleigh quotient has zero denominator");
  QuotientResult q;
  q.numerator = numerator;
  q.denominator = denominator;
  q.quotient = numerator / denominator;
  q.error = std::abs(q.quotient) * (std::abs(num_err / numerator) + std::abs(den_err / denominator));
  q.evaluations = evals;
  return q;
}

}  // namespace

// ---------------------------------------------------------------------------

Lemma1Function::Lemma1Function(double epsilon, int dimension)
    : epsilon_(epsilon),
      ball_(analytic::ball_spectrum(dimension)),
      cone_(epsilon),
      domain_(geometry::Domain::dumbbell(dimension, epsilon)) {}

ValueGradient Lemma1Function::ball_term(std::span<const double> x) const {
  return shifted_ball(ball_, 1.0 - epsilon_, x);
}

ValueGradient Lemma1Function::evaluate(std::span<const double> x) const {
  if (!geometry::contains(domain_, x, Junction::kIncluded))
    throw InvalidArgument("Lemma1Function evaluated outside the dumbbell");
  std::array<double, 3> y{};
  std::copy(x.begin(), x.end(), y.begin());
  const bool mirrored = y[0] < 0.0;
  y[0] = std::abs(y[0]);
  const std::span<const double> ys(y.data(), x.size());

  ValueGradient out = ball_term(ys);
  const double height = cone_.height_function(ys);
  if (height > 0.0) {
    const double half_kappa = 0.5 * kappa();
    out.value += half_kappa * height;
    out.gradient[0] -= half_kappa;
    const double rho = transverse_norm(ys);
    if (rho > 0.0) {
      for (std::size_t i = 1; i < x.size(); ++i) out.gradient[i] -= half_kappa * y[i] / rho;
    } else {
      out.gradient_defined = false;
    }
  }
  if (mirrored) out.gradient[0] = -out.gradient[0];
  return out;
}

Lemma2Function::Lemma2Function(double epsilon, int dimension)
    : epsilon_(epsilon),
      ball_(analytic::ball_spectrum(dimension)),
      domain_(geometry::Domain::dumbbell(dimension, epsilon)) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidArgument("Lemma2Function requires 0 < eps < 0.5");
}

double Lemma2Function::cutoff(std::span<const double> x) const { return std::clamp(x[0] / epsilon_, 0.0, 1.0); }

std::array<double, 3> Lemma2Function::cutoff_gradient(std::span<const double> x) const {
  std::array<double, 3> g{};
  if (x[0] > 0.0 && x[0] < epsilon_) g[0] = 1.0 / epsilon_;
  return g;
}

ValueGradient Lemma2Function::evaluate(std::span<const double> x) const {
  if (!geometry::contains(domain_, x, Junction::kIncluded))
    throw InvalidArgument("Lemma2Function evaluated outside the dumbbell");
  if (x[0] <= 0.0) return ValueGradient{};
  const ValueGradient u = shifted_ball(ball_, 1.0 - epsilon_, x);
  const double xi = cutoff(x);
  const auto dxi = cutoff_gradient(x);
  ValueGradient out;
  out.value = u.value * xi;
  for (std::size_t i = 0; i < x.size(); ++i) out.gradient[i] = u.gradient[i] * xi + u.value * dxi[i];
  return out;
}

quad::Config lemma_quadrature() {
  quad::Config c;
  c.rel_tol = 1e-11;
  c.abs_tol = 1e-16;
  c.max_intervals = 4000;
  return c;
}

Lemma1Result lemma1_rayleigh(double epsilon, int dimension, const quad::Config& config) {
  check_lemma_args(epsilon, dimension);
  const auto ball = analytic::ball_spectrum(dimension);
  const int n = dimension;
  const double centre = 1.0 - epsilon;
  const double apex = std::sqrt(2.0 * epsilon - epsilon * epsilon);
  const double half_kappa = 0.5 * ball.kappa;

  // Omega_eps^+ = B_eps cut by {x1 = 0}.
  const auto base = ball_cut_integrals(ball, epsilon, 0.0, config);

  // Cone corrections in (x1, rho): |grad u~|^2 - |grad u|^2 and u~^2 - u^2.
  auto cone_integrand = [&](double x1, double rho) {
    const double d1 = x1 - centre;
    const double r = std::sqrt(d1 * d1 + rho * rho);
    const auto s = analytic::ball_eigenfunction_unchecked(ball, r);
    const double g = half_kappa * (apex - x1 - rho);
    const double grad_dot_shift = -half_kappa * s.derivative / r * (d1 + rho);
    const double w = transverse_weight(n, rho);
    return std::array<double, 2>{w * (2.0 * s.value * g + g * g),
                                 w * (2.0 * grad_dot_shift + 2.0 * half_kappa * half_kappa)};
  };
  const auto cone = quad::integrate_2d<2>(
      cone_integrand, 0.0, apex, [](double) { return 0.0; }, [apex](double x1) { return apex - x1; }, config,
      inner_config(config));

  const bool ok = base.converged && cone.converged;
  if (!ok) throw ConvergenceFailure("lemma1 quadrature did not converge");
  const double den = base.value[0] + cone.value[0];
  const double num = base.value[1] + cone.value[1];
  Lemma1Result result;
  static_cast<QuotientResult&>(result) =
      make_quotient(num, base.error[1] + cone.error[1], den, base.error[0] + cone.error[0],
                    base.evaluations + cone.evaluations);
  result.deficit = ball.lambda1 - result.quotient;
  return result;
}

Lemma2Result lemma2_rayleigh(double epsilon, int dimension, const quad::Config& config) {
  check_lemma_args(epsilon, dimension);
  const auto ball = analytic::ball_spectrum(dimension);
  const int n = dimension;
  const double centre = 1.0 - epsilon;

  // O_eps = {x1 >= eps}: xi = 1 there.
  const auto plateau = ball_cut_integrals(ball, epsilon, epsilon, config);

  // Strip 0 < x1 < eps with xi = x1/eps and grad xi = e1/eps.
  auto strip_integrand = [&](double x1, double rho) {
    const double d1 = x1 - centre;
    const double r = std::sqrt(d1 * d1 + rho * rho);
    const auto s = analytic::ball_eigenfunction_unchecked(ball, r);
    const double xi = x1 / epsilon;
    const double dxi = 1.0 / epsilon;
    const double du1 = r > 0.0 ? s.derivative * d1 / r : 0.0;
    const double grad_sq = s.derivative * s.derivative;
    const double w = transverse_weight(n, rho);
    const double num = grad_sq * xi * xi + dxi * dxi * s.value * s.value + 2.0 * s.value * xi * du1 * dxi;
    return std::array<double, 2>{w * s.value * s.value * xi * xi, w * num};
  };
  auto rho_max = [centre](double x1) {
    const double d1 = x1 - centre;
    return std::sqrt(std::max(0.0, 1.0 - d1 * d1));
  };
  const auto strip = quad::integrate_2d<2>(
      strip_integrand, 0.0, epsilon, [](double) { return 0.0; }, rho_max, config, inner_config(config));

  if (!(plateau.converged && strip.converged)) throw ConvergenceFailure("lemma2 quadrature did not converge");
  const double den = plateau.value[0] + strip.value[0];
  const double num = plateau.value[1] + strip.value[1];
  Lemma2Result result;
  static_cast<QuotientResult&>(result) =
      make_quotient(num, plateau.error[1] + strip.error[1], den, plateau.error[0] + strip.error[0],
                    plateau.evaluations + strip.evaluations);
  result.excess = result.quotient - ball.lambda1;
  return result;
}

// ---------------------------------------------------------------------------
// Generic quotient over star-shaped charts.

namespace {

struct Chart {
  std::array<double, 3> centre{};
  double scale = 1.0;
  // Distance from the centre to the boundary along a unit direction.
  std::function<double(const std::array<double, 3>&)> radius;
  // Angles where the radius function has kinks (N = 2: theta in [-pi, pi];
  // N = 3: polar angle from e1 in [0, pi]).
  std::vector<double> breaks;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Chart half_ball_chart(double epsilon, int sign, int dimension) {
  Chart c;
  c.centre[0] = sign * (1.0 - epsilon);
  const double depth = 1.0 - epsilon;
  c.radius = [depth, sign](const std::array<double, 3>& dir) {
    const double toward = -sign * dir[0];
    return toward > 0.0 ? std::min(1.0, depth / toward) : 1.0;
  };
  const double kink = std::acos(depth);
  if (dimension == 2) {
    if (sign > 0) c.breaks = {kPi - kink, -(kPi - kink)};
    else c.breaks = {kink, -kink};
  } else {
    c.breaks = {sign > 0 ? kPi - kink : kink};
  }
  return c;
}

void collect_charts(const geometry::Domain& domain, std::vector<Chart>& out) {
  const int n = domain.dimension();
  std::visit(
      Overloaded{
          [&](const geometry::Ball& b) {
            Chart c;
            std::copy(b.center.begin(), b.center.end(), c.centre.begin());
            const double r = b.radius;
            c.radius = [r](const std::array<double, 3>&) { return r; };
            out.push_back(std::move(c));
          },
          [&](const geometry::TwoBalls& t) {
            for (int sign : {-1, 1}) {
              Chart c;
              c.centre[0] = sign * 0.5 * t.separation;
              const double r = t.radius;
              c.radius = [r](const std::array<double, 3>&) { return r; };
              out.push_back(std::move(c));
            }
          },
          [&](const geometry::Dumbbell& d) {
            out.push_back(half_ball_chart(d.epsilon, 1, n));
            out.push_back(half_ball_chart(d.epsilon, -1, n));
          },
          [&](const geometry::HalfDumbbell& d) { out.push_back(half_ball_chart(d.epsilon, 1, n)); },
          [&](const geometry::Box& b) {
            if (n != 2) throw InvalidArgument("box quadrature supports N = 2 only");
            Chart c;
            const double hw = 0.5 * (b.upper[0] - b.lower[0]);
            const double hh = 0.5 * (b.upper[1] - b.lower[1]);
            c.centre = {b.lower[0] + hw, b.lower[1] + hh, 0.0};
            c.radius = [hw, hh](const std::array<double, 3>& dir) {
              double r = 1e300;
              if (dir[0] != 0.0) r = std::min(r, hw / std::abs(dir[0]));
              if (dir[1] != 0.0) r = std::min(r, hh / std::abs(dir[1]));
              return r;
            };
            const double corner = std::atan2(hh, hw);
            c.breaks = {corner, kPi - corner, -corner, -(kPi - corner)};
            out.push_back(std::move(c));
          },
          [&](const geometry::Ellipsoid& e) {
            Chart c;
            std::copy(e.center.begin(), e.center.end(), c.centre.begin());
            const auto axes = e.semi_axes;
            c.radius = [axes](const std::array<double, 3>& dir) {
              double s = 0.0;
              for (std::size_t i = 0; i < axes.size(); ++i) s += dir[i] * dir[i] / (axes[i] * axes[i]);
              return 1.0 / std::sqrt(s);
            };
            out.push_back(std::move(c));
          },
          [&](const geometry::Scaled& s) {
            std::vector<Chart> inner;
            collect_charts(*s.inner, inner);
            for (auto& c : inner) {
              for (double& x : c.centre) x *= s.factor;
              c.scale *= s.factor;
              out.push_back(std::move(c));
            }
          },
          [&](const geometry::DisjointUnion& u) {
            for (const auto& p : u.parts) collect_charts(p, out);
          },
      },
      domain.shape());
}

}  // namespace

QuotientResult rayleigh_quotient(const geometry::Domain& domain, const Field& field, const quad::Config& config) {
  const int n = domain.dimension();
  if (n != 2 && n != 3) throw InvalidArgument("rayleigh_quotient supports N in {2, 3}");
  std::vector<Chart> charts;
  collect_charts(domain, charts);
  const quad::Config inner = inner_config(config);
  const quad::Config innermost = inner_config(inner);

  double num = 0.0, den = 0.0, num_err = 0.0, den_err = 0.0;
  int evals = 0;
  bool converged = true;
  for (const auto& chart : charts) {
    auto sample = [&](const std::array<double, 3>& dir, double r) {
      std::array<double, 3> x{};
      for (int i = 0; i < n; ++i) x[i] = chart.centre[i] + r * dir[i];
      const auto f = field(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
      double g2 = 0.0;
      for (int i = 0; i < n; ++i) g2 += f.gradient[i] * f.gradient[i];
      const double w = std::pow(r, n - 1);
      return std::array<double, 2>{w * f.value * f.value, w * g2};
    };
    quad::Result<2> res;
    if (n == 2) {
      auto integrand = [&](double theta, double r) {
        return sample({std::cos(theta), std::sin(theta), 0.0}, r);
      };
      auto hi = [&](double theta) { return chart.scale * chart.radius({std::cos(theta), std::sin(theta), 0.0}); };
      res = quad::integrate_2d<2>(integrand, -kPi, kPi, [](double) { return 0.0; }, hi, config, inner,
                                  chart.breaks);
    } else {
      auto over_theta = [&](double theta) {
        auto integrand = [&](double phi, double r) {
          auto v = sample({std::cos(theta), std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi)}, r);
          for (double& c : v) c *= std::sin(theta);
          return v;
        };
        auto hi = [&](double phi) {
          return chart.scale *
                 chart.radius({std::cos(theta), std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi)});
        };
        auto r = quad::integrate_2d<2>(integrand, 0.0, 2.0 * kPi, [](double) { return 0.0; }, hi, inner,
                                       innermost);
        converged = converged && r.converged;
        evals += r.evaluations;
        return r.value;
      };
      res = quad::integrate<2>(over_theta, 0.0, kPi, config, chart.breaks);
    }
    converged = converged && res.converged;
    den += res.value[0];
    num += res.value[1];
    den_err += res.error[0];
    num_err += res.error[1];
    evals += res.evaluations;
  }
  auto q = make_quotient(num, num_err, den, den_err, evals);
  if (!converged) q.error = std::max(q.error, config.rel_tol * std::abs(q.quotient) * 100.0);
  return q;
}

// ---------------------------------------------------------------------------

double odd_correlation(const discretize::Grid2D& grid, const Eigen::VectorXd& v) {
  double cross = 0.0;
  double norm = 0.0;
  for (int row = 0; row < grid.size(); ++row) {
    const auto& p = grid.active()[static_cast<std::size_t>(row)];
    const int mirror = grid.index_of(-p.i, p.j);
    const double w = mirror < 0 ? 0.0 : v[mirror];
    cross += v[row] * w;
    norm += v[row] * v[row];
  }
  return -cross / norm;
}

OddExtensionReport odd_extension_check(double epsilon, const eigensolve::LadderOptions& options) {
  OddExtensionReport report{
      .epsilon = epsilon,
      .dumbbell = eigensolve::solve_ladder(geometry::Domain::dumbbell(2, epsilon), options),
      .half = eigensolve::solve_ladder(geometry::Domain::half_dumbbell(2, epsilon), options),
  };
  report.lambda2_dumbbell = report.dumbbell.lambda2.value;
  report.lambda1_half = report.half.lambda1.value;
  report.gap = report.lambda2_dumbbell - report.lambda1_half;
  report.combined_tolerance =
      eigensolve::discretization_budget(report.dumbbell, 1) + eigensolve::discretization_budget(report.half, 0);
  report.inequality_holds = report.gap <= 2.0 * report.combined_tolerance;
  report.odd_correlation = std::abs(odd_correlation(report.dumbbell.finest_grid, report.dumbbell.finest.vectors.at(1)));
  return report;
}

}  // namespace spectralgap::testfn
