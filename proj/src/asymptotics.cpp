#include "spectralgap/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "detail/parallel.hpp"
#include "spectralgap/analytic.hpp"
#include "spectralgap/error.hpp"

namespace spectralgap::asymptotics {

namespace {

using attainable::format_number;
using attainable::SweepRecord;

std::vector<RatioPoint> sorted(std::vector<RatioPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const RatioPoint& a, const RatioPoint& b) { return a.epsilon < b.epsilon; });
  return points;
}

RatioPoint make_point(double eps, double numerator, double denominator) {
  RatioPoint p{.epsilon = eps, .numerator = numerator, .denominator = denominator};
  p.valid = denominator > 0.0;
  p.ratio = p.valid ? numerator / denominator : 0.0;
  return p;
}

template <typename Fn>
std::vector<LemmaPoint> series(const std::vector<double>& eps, int jobs, Fn&& fn) {
  validate_eps_grid(eps);
  std::vector<LemmaPoint> out(eps.size());
  std::vector<std::string> failures(eps.size());
  detail::parallel_for(eps.size(), jobs, [&](std::size_t i) {
    try {
      out[i] = fn(eps[i]);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!failures[i].empty()) throw ConvergenceFailure("eps = " + format_number(eps[i]) + ": " + failures[i]);
  return out;
}

}  // namespace

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pairs, std::pair<double, double> window) {
  auto in_window = pairs;
  std::erase_if(in_window, [&](const auto& p) { return p.first < window.first || p.first > window.second; });
  std::sort(in_window.begin(), in_window.end());
  for (const auto& [x, y] : in_window) {
    if (!(x > 0.0)) throw InvalidArgument("fit_slope: eps must be positive");
    if (!(y > 0.0)) throw InvalidArgument("fit_slope: nonpositive value at eps = " + format_number(x));
  }
  if (in_window.size() < 4) throw InvalidArgument("fit_slope: at least 4 points are required in the window");

  const double n = static_cast<double>(in_window.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : in_window) {
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : in_window) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_slope: eps values must not all coincide");

  SlopeFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.window_min = in_window.front().first;
  fit.window_max = in_window.back().first;
  fit.n_points = static_cast<int>(in_window.size());
  return fit;
}

std::vector<double> default_eps_grid(double eps_max) {
  if (!(eps_max >= 0.005 && eps_max <= 0.3)) throw InvalidArgument("eps_max must lie in [0.005, 0.3]");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double e = 0.005 * std::pow(std::sqrt(2.0), k);
    if (e > eps_max * (1.0 + 1e-12)) break;
    out.push_back(e);
  }
  if (std::abs(out.back() - eps_max) > 1e-12 * eps_max) out.push_back(eps_max);
  return out;
}

void validate_eps_grid(const std::vector<double>& eps) {
  if (eps.empty()) throw InvalidArgument("eps grid is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] <= 0.3))
      throw InvalidArgument("eps = " + format_number(eps[i]) + " lies outside (0, 0.3]");
    if (i > 0 && !(eps[i] > eps[i - 1])) throw InvalidArgument("eps grid must be strictly increasing");
  }
}

RatioCurve ratio_curve(const std::vector<SweepRecord>& records, int dimension) {
  const auto theta = analytic::theta_spectrum(dimension);
  RatioCurve curve;
  curve.dimension = dimension;
  for (const auto& r : records) {
    if (r.family != "dumbbell" || r.failed()) continue;
    if (r.has_bounds()) {
      auto p = make_point(r.param, r.bound2 - theta.second, theta.first - r.bound1);
      if (!p.valid) curve.flags.push_back("bound path: nonpositive denominator at eps = " + format_number(r.param));
      curve.bound_path.push_back(p);
    }
    if (r.has_grid()) {
      auto p = make_point(r.param, r.lambda2_norm - theta.second, theta.first - r.lambda1_norm);
      if (!p.valid) curve.flags.push_back("grid path: nonpositive denominator at eps = " + format_number(r.param));
      curve.grid_path.push_back(p);
    }
  }
  curve.bound_path = sorted(std::move(curve.bound_path));
  curve.grid_path = sorted(std::move(curve.grid_path));
  return curve;
}

void write_ratio_csv(std::ostream& out, const RatioCurve& curve) {
  out << "path,epsilon,numerator,denominator,ratio,valid\n";
  const auto rows = [&](const char* name, const std::vector<RatioPoint>& points) {
    for (const auto& p : points)
      out << name << ',' << format_number(p.epsilon) << ',' << format_number(p.numerator) << ','
          << format_number(p.denominator) << ',' << (p.valid ? format_number(p.ratio) : std::string()) << ','
          << (p.valid ? 1 : 0) << '\n';
  };
  rows("bound", curve.bound_path);
  rows("grid", curve.grid_path);
}

Verdict verify_theorem(const RatioCurve& curve, const Criteria& criteria) {
  std::vector<RatioPoint> pts;
  for (const auto& p : curve.bound_path)
    if (p.valid) pts.push_back(p);
  pts = sorted(std::move(pts));
  if (pts.size() < 4) throw InvalidArgument("verify_theorem: fewer than 4 valid bound-path points");

  Verdict v;
  int inversions = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].ratio < pts[i - 1].ratio) ++inversions;
  {
    std::ostringstream d;
    d << inversions << " inversion(s) over " << pts.size() << " points, allowed " << criteria.max_inversions;
    v.checks.push_back({"monotone_decrease", inversions <= criteria.max_inversions, d.str()});
  }
  {
    const double lo = pts.front().ratio, hi = pts.back().ratio;
    std::ostringstream d;
    d << "ratio(" << format_number(pts.front().epsilon) << ") = " << format_number(lo) << ", ratio("
      << format_number(pts.back().epsilon) << ") = " << format_number(hi) << ", factor "
      << format_number(criteria.decay_factor);
    v.checks.push_back({"decay", lo <= criteria.decay_factor * hi, d.str()});
  }
  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& p : pts) pairs.emplace_back(p.epsilon, p.ratio);
    std::ostringstream d;
    bool pass = false;
    try {
      v.fit = fit_slope(pairs, criteria.fit_window);
      pass = v.fit.exponent >= criteria.min_exponent;
      d << "exponent " << format_number(v.fit.exponent) << " (r^2 " << format_number(v.fit.r_squared) << ") on ["
        << format_number(v.fit.window_min) << ", " << format_number(v.fit.window_max) << "], required >= "
        << format_number(criteria.min_exponent);
      if (pts.size() >= 4) {
        const auto all = fit_slope(pairs, {pts.front().epsilon, pts.back().epsilon});
        d << "; full range exponent " << format_number(all.exponent);
      }
    } catch (const InvalidArgument& e) {
      d << e.what();
    }
    v.checks.push_back({"exponent", pass, d.str()});
  }
  v.pass = std::all_of(v.checks.begin(), v.checks.end(), [](const Check& c) { return c.pass; });
  return v;
}

Verdict verify_theorem(const std::vector<SweepRecord>& records, const Criteria& criteria, int dimension) {
  return verify_theorem(ratio_curve(records, dimension), criteria);
}

nlohmann::json to_json(const Verdict& verdict) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : verdict.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  nlohmann::json out{{"pass", verdict.pass}, {"checks", checks}};
  out["data_csv_path"] = verdict.data_csv_path ? nlohmann::json(*verdict.data_csv_path) : nlohmann::json();
  return out;
}

std::vector<SweepRecord> bound_records(const std::vector<double>& eps, int dimension, const quad::Config& quad,
                                       int jobs) {
  validate_eps_grid(eps);
  std::vector<SweepRecord> out(eps.size());
  detail::parallel_for(eps.size(), jobs, [&](std::size_t i) {
    auto rec = attainable::make_record("dumbbell", eps[i]);
    try {
      rec.measure = geometry::measure(geometry::Domain::dumbbell(dimension, eps[i]));
      rec.t_factor = std::pow(geometry::unit_ball_volume(dimension) / rec.measure, 1.0 / dimension);
      const double factor = attainable::normalization_factor(rec.measure, dimension);
      const auto l1 = testfn::lemma1_rayleigh(eps[i], dimension, quad);
      const auto l2 = testfn::lemma2_rayleigh(eps[i], dimension, quad);
      rec.bound1 = l1.quotient * factor;
      rec.bound2 = l2.quotient * factor;
      rec.error_est = factor * std::max(l1.error, l2.error);
    } catch (const std::exception& e) {
      rec.status = std::string("error: ") + e.what();
    }
    out[i] = std::move(rec);
  });
  return out;
}

std::vector<LemmaPoint> lemma1_series(const std::vector<double>& eps, int dimension, const quad::Config& quad,
                                      int jobs) {
  return series(eps, jobs, [&](double e) {
    const auto r = testfn::lemma1_rayleigh(e, dimension, quad);
    return LemmaPoint{e, r.quotient, r.deficit, r.error};
  });
}

std::vector<LemmaPoint> lemma2_series(const std::vector<double>& eps, int dimension, const quad::Config& quad,
                                      int jobs) {
  return series(eps, jobs, [&](double e) {
    const auto r = testfn::lemma2_rayleigh(e, dimension, quad);
    return LemmaPoint{e, r.quotient, r.excess, r.error};
  });
}

SlopeFit fit_series(const std::vector<LemmaPoint>& s, std::pair<double, double> window) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : s) pairs.emplace_back(p.epsilon, p.gap);
  return fit_slope(pairs, window);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  if (config.dimension != 2 && config.dimension != 3) throw InvalidArgument("pipeline supports N in {2, 3}");
  validate_eps_grid(config.eps_grid);
  if (config.dimension == 2) {
    if (!config.grid_eps.empty()) validate_eps_grid(config.grid_eps);
    eigensolve::validate_levels(config.ladder.h_levels);
  }

  PipelineResult result;
  result.records = bound_records(config.eps_grid, config.dimension, config.quad, config.jobs);
  for (const auto& r : result.records)
    if (r.failed()) throw ConvergenceFailure("lemma quadrature failed at eps = " + format_number(r.param) + ": " + r.status);

  if (config.dimension == 2 && !config.grid_eps.empty()) {
    const auto& eps = config.grid_eps;
    std::vector<GridCrossCheck> checks(eps.size());
    std::vector<std::string> failures(eps.size());
    detail::parallel_for(eps.size(), config.jobs, [&](std::size_t i) {
      try {
        auto& c = checks[i];
        c.epsilon = eps[i];
        c.lemma1 = testfn::lemma1_rayleigh(eps[i], 2, config.quad);
        c.lemma2 = testfn::lemma2_rayleigh(eps[i], 2, config.quad);
        c.odd = testfn::odd_extension_check(eps[i], config.ladder);
        c.lambda1_dumbbell = c.odd.dumbbell.lambda1.value;
        c.tolerance_dumbbell = eigensolve::discretization_budget(c.odd.dumbbell, 0) + c.lemma1.error;
        c.tolerance_half = eigensolve::discretization_budget(c.odd.half, 0) + c.lemma2.error;
        c.lemma1_consistent = c.lemma1.quotient >= c.lambda1_dumbbell - c.tolerance_dumbbell;
        c.lemma2_consistent = c.lemma2.quotient >= c.odd.lambda1_half - c.tolerance_half;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (!failures[i].empty())
        throw ConvergenceFailure("grid cross-check failed at eps = " + format_number(eps[i]) + ": " + failures[i]);

    for (const auto& c : checks) {
      auto rec = attainable::make_record("dumbbell", c.epsilon);
      rec.measure = geometry::measure(geometry::Domain::dumbbell(2, c.epsilon));
      rec.t_factor = std::sqrt(geometry::unit_ball_volume(2) / rec.measure);
      rec.error_est = 0.0;
      attainable::add_ladder(rec, c.odd.dumbbell);
      result.records.push_back(std::move(rec));

      const std::string at = " at eps = " + format_number(c.epsilon);
      result.consistency.push_back(
          {"lemma1_upper_bound" + at, c.lemma1_consistent,
           "quotient " + format_number(c.lemma1.quotient) + ", grid lambda1 " + format_number(c.lambda1_dumbbell) +
               ", tolerance " + format_number(c.tolerance_dumbbell)});
      result.consistency.push_back(
          {"lemma2_upper_bound" + at, c.lemma2_consistent,
           "quotient " + format_number(c.lemma2.quotient) + ", grid half lambda1 " +
               format_number(c.odd.lambda1_half) + ", tolerance " + format_number(c.tolerance_half)});
      result.consistency.push_back(
          {"odd_extension" + at, c.odd.inequality_holds && c.odd.odd_correlation >= 0.99,
           "lambda2 - lambda1(half) = " + format_number(c.odd.gap) + ", tolerance " +
               format_number(c.odd.combined_tolerance) + ", odd correlation " + format_number(c.odd.odd_correlation)});
    }
    result.cross_checks = std::move(checks);
  }

  result.curve = ratio_curve(result.records, config.dimension);
  for (const auto& p : result.curve.grid_path) {
    const double tol = std::find_if(result.records.begin(), result.records.end(), [&](const SweepRecord& r) {
                         return r.has_grid() && r.param == p.epsilon;
                       })->error_est;
    result.consistency.push_back({"grid_numerator_nonnegative at eps = " + format_number(p.epsilon),
                                  p.numerator >= -tol,
                                  "numerator " + format_number(p.numerator) + ", tolerance " + format_number(tol)});
  }
  result.verdict = verify_theorem(result.curve, config.criteria);
  return result;
}

nlohmann::json to_json(const PipelineResult& result) {
  auto out = to_json(result.verdict);
  nlohmann::json consistency = nlohmann::json::array();
  for (const auto& c : result.consistency)
    consistency.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  out["consistency"] = consistency;
  using attainable::round_significant;
  const auto& fit = result.verdict.fit;
  out["fit"] = {{"exponent", round_significant(fit.exponent)},
                {"prefactor", round_significant(fit.prefactor)},
                {"r_squared", round_significant(fit.r_squared)},
                {"window", {round_significant(fit.window_min), round_significant(fit.window_max)}},
                {"n_points", result.verdict.fit.n_points}};
  nlohmann::json flags = nlohmann::json::array();
  for (const auto& f : result.curve.flags) flags.push_back(f);
  out["flags"] = flags;
  return out;
}

}  // namespace spectralgap::asymptotics
