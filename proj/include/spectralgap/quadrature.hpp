#pragma once

// Adaptive Gauss–Kronrod (7/15) quadrature for small fixed-size vector
// integrands. Several integrals over the same interval share nodes, which
// keeps numerator and denominator of a Rayleigh quotient on one mesh.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace spectralgap::quad {

struct Config {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_intervals = 4000;
};

template <std::size_t M>
struct Result {
  std::array<double, M> value{};
  std::array<double, M> error{};
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t M>
struct Segment {
  double a;
  double b;
  std::array<double, M> value;
  std::array<double, M> error;
  bool at_roundoff = false;  // error estimate is at the roundoff floor
};

template <std::size_t M, class F>
Segment<M> kronrod15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, M> kronrod{};
  std::array<double, M> gauss{};
  std::array<double, M> abs_sum{};
  std::array<std::array<double, M>, 15> samples;

  samples[7] = f(centre);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    samples[i] = f(centre - dx);
    samples[14 - i] = f(centre + dx);
  }
  for (std::size_t m = 0; m < M; ++m) {
    double k = kKronrodWeights[7] * samples[7][m];
    double g = kGaussWeights[3] * samples[7][m];
    double s = kKronrodWeights[7] * std::abs(samples[7][m]);
    for (int i = 0; i < 7; ++i) {
      const double pair = samples[i][m] + samples[14 - i][m];
      k += kKronrodWeights[i] * pair;
      s += kKronrodWeights[i] * (std::abs(samples[i][m]) + std::abs(samples[14 - i][m]));
      if (i % 2 == 1) g += kGaussWeights[i / 2] * pair;
    }
    kronrod[m] = k * half;
    gauss[m] = g * half;
    abs_sum[m] = s * std::abs(half);
  }

  Segment<M> seg{a, b, kronrod, {}, true};
  for (std::size_t m = 0; m < M; ++m) {
    // QUADPACK-style error heuristic.
    const double mean = kronrod[m] / (b - a);
    double resasc = 0.0;
    for (int i = 0; i < 15; ++i) {
      const double w = i == 7 ? kKronrodWeights[7] : kKronrodWeights[i < 7 ? i : 14 - i];
      resasc += w * std::abs(samples[i][m] - mean);
    }
    resasc *= std::abs(half);
    double err = std::abs(kronrod[m] - gauss[m]);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double roundoff = 50.0 * 2.22e-16 * abs_sum[m];
    if (err > roundoff) seg.at_roundoff = false;
    seg.error[m] = std::max(err, roundoff);
  }
  return seg;
}

}  // namespace detail

/// Integrates a vector-valued `f` over [a, b], splitting first at the given
/// interior breakpoints (sorted or not; values outside (a, b) are ignored).
/// Global adaptive bisection on the worst segment until every component
/// satisfies err <= max(abs_tol, rel_tol * |I|).
template <std::size_t M, class F>
Result<M> integrate(F&& f, double a, double b, const Config& config,
                    std::vector<double> breakpoints = {}) {
  Result<M> result;
  if (a == b) return result;

  std::vector<double> cuts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double p : breakpoints)
    if (p > std::min(a, b) && p < std::max(a, b)) cuts.push_back(p);
  if (a > b) std::reverse(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);

  std::vector<detail::Segment<M>> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i] != cuts[i + 1]) segments.push_back(detail::kronrod15<M>(f, cuts[i], cuts[i + 1]));

  auto totals = [&](std::array<double, M>& value, std::array<double, M>& error) {
    value.fill(0.0);
    error.fill(0.0);
    for (const auto& s : segments)
      for (std::size_t m = 0; m < M; ++m) {
        value[m] += s.value[m];
        error[m] += s.error[m];
      }
  };

  while (true) {
    totals(result.value, result.error);
    std::array<double, M> allowed{};
    bool done = true;
    for (std::size_t m = 0; m < M; ++m) {
      allowed[m] = std::max(config.abs_tol, config.rel_tol * std::abs(result.value[m]));
      if (result.error[m] > allowed[m]) done = false;
    }
    if (done) break;
    if (static_cast<int>(segments.size()) >= config.max_intervals) {
      result.converged = false;
      break;
    }
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].at_roundoff) continue;
      double score = 0.0;
      for (std::size_t m = 0; m < M; ++m) score = std::max(score, segments[i].error[m] / allowed[m]);
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    // Only roundoff-limited segments remain: refining cannot help.
    if (worst_score < 0.0) break;
    const auto seg = segments[worst];
    const double mid = 0.5 * (seg.a + seg.b);
    if (mid == seg.a || mid == seg.b) {
      result.converged = false;
      break;
    }
    segments[worst] = detail::kronrod15<M>(f, seg.a, mid);
    segments.push_back(detail::kronrod15<M>(f, mid, seg.b));
  }
  result.evaluations = static_cast<int>(segments.size()) * 15;
  return result;
}

/// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(F&& f, double a, double b, const Config& config,
                           std::vector<double> breakpoints = {}) {
  return integrate<1>([&](double x) { return std::array<double, 1>{f(x)}; }, a, b, config,
                      std::move(breakpoints));
}

/// Nested integral over {a < x < b, lo(x) < y < hi(x)}. The outer error
/// estimate is widened by the worst relative error seen in an inner solve.
template <std::size_t M, class F, class Lo, class Hi>
Result<M> integrate_2d(F&& f, double a, double b, Lo&& lo, Hi&& hi, const Config& outer,
                       const Config& inner, std::vector<double> breakpoints = {}) {
  double worst_inner_rel = 0.0;
  bool inner_ok = true;
  int inner_evals = 0;
  auto outer_integrand = [&](double x) {
    auto r = integrate<M>([&](double y) { return f(x, y); }, lo(x), hi(x), inner);
    inner_ok = inner_ok && r.converged;
    inner_evals += r.evaluations;
    for (std::size_t m = 0; m < M; ++m)
      if (r.value[m] != 0.0)
        worst_inner_rel = std::max(worst_inner_rel, r.error[m] / std::abs(r.value[m]));
    return r.value;
  };
  auto result = integrate<M>(outer_integrand, a, b, outer, std::move(breakpoints));
  for (std::size_t m = 0; m < M; ++m) result.error[m] += worst_inner_rel * std::abs(result.value[m]);
  result.converged = result.converged && inner_ok;
  result.evaluations += inner_evals;
  return result;
}

}  // namespace spectralgap::quad
