#include "spectralgap/attainable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

#include "detail/parallel.hpp"
#include "spectralgap/analytic.hpp"
#include "spectralgap/error.hpp"

namespace spectralgap::attainable {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fillers must clear t * lambda2(base) by this factor so that grid errors
// cannot reorder the spectrum.
constexpr double kDominanceMargin = 1.02;

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_number(values[i]);
  }
  return out;
}

std::string cell(double value) { return std::isfinite(value) ? format_number(value) : std::string(); }

void check_param(Family family, double param) {
  if (!std::isfinite(param)) throw InvalidArgument("family parameter must be finite");
  switch (family) {
    case Family::kDumbbell:
      if (!(param > 0.0 && param <= 0.3)) throw InvalidArgument("dumbbell eps must lie in (0, 0.3]");
      break;
    case Family::kTwoBallsRatio:
      if (!(param > 0.0 && param <= 1.0)) throw InvalidArgument("radius ratio must lie in (0, 1]");
      break;
    case Family::kRectangle:
    case Family::kEllipse:
      if (!(param >= 1.0)) throw InvalidArgument("aspect ratio must be >= 1");
      break;
    case Family::kBall:
      break;
  }
}

SweepRecord empty_record(const std::string& family, double param) {
  SweepRecord rec;
  rec.family = family;
  rec.param = param;
  rec.measure = rec.t_factor = kNaN;
  rec.lambda1_x = rec.lambda2_x = kNaN;
  rec.lambda1_norm = rec.lambda2_norm = kNaN;
  rec.bound1 = rec.bound2 = kNaN;
  return rec;
}

void fill_grid(SweepRecord& rec, const geometry::Domain& domain, const SweepConfig& config) {
  add_ladder(rec, eigensolve::solve_ladder(domain, config.ladder));
}

SweepRecord compute(Family family, double param, const SweepConfig& config) {
  SweepRecord rec = empty_record(family_name(family), param);
  try {
    const auto domain = family_domain(family, param);
    rec.measure = geometry::measure(domain);
    rec.t_factor = std::sqrt(geometry::unit_ball_volume(2) / rec.measure);
    if (family == Family::kDumbbell && config.bounds) {
      const double factor = normalization_factor(rec.measure, 2);
      const auto l1 = testfn::lemma1_rayleigh(param, 2, config.quad);
      const auto l2 = testfn::lemma2_rayleigh(param, 2, config.quad);
      rec.bound1 = l1.quotient * factor;
      rec.bound2 = l2.quotient * factor;
      rec.error_est += factor * std::max(l1.error, l2.error);
    }
    if (config.grid) fill_grid(rec, domain, config);
  } catch (const std::exception& e) {
    rec.status = std::string("error: ") + e.what();
    rec.error_est = kNaN;
  }
  return rec;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(format_number(value).c_str(), nullptr);
}

std::string family_name(Family family) {
  switch (family) {
    case Family::kDumbbell: return "dumbbell";
    case Family::kTwoBallsRatio: return "two_balls_ratio";
    case Family::kRectangle: return "rectangle";
    case Family::kEllipse: return "ellipse";
    case Family::kBall: return "ball";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  for (Family f : all_families())
    if (family_name(f) == name) return f;
  throw InvalidArgument("unknown family '" + name + "'");
}

std::vector<Family> all_families() {
  return {Family::kDumbbell, Family::kTwoBallsRatio, Family::kRectangle, Family::kEllipse, Family::kBall};
}

std::vector<double> default_params(Family family) {
  switch (family) {
    case Family::kDumbbell: return {0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    case Family::kTwoBallsRatio: return {0.5, 0.7, 0.8, 0.9, 1.0};
    case Family::kRectangle: return {1.0, 1.5, 2.0, 3.0};
    case Family::kEllipse: return {1.25, 1.5, 2.0, 3.0};
    case Family::kBall: return {1.0};
  }
  return {};
}

geometry::Domain family_domain(Family family, double param) {
  using geometry::Domain;
  check_param(family, param);
  switch (family) {
    case Family::kDumbbell: return Domain::dumbbell(2, param);
    case Family::kTwoBallsRatio:
      return Domain::disjoint_union({Domain::ball({-1.5, 0.0}, 1.0), Domain::ball({param + 0.5, 0.0}, param)});
    case Family::kRectangle: return Domain::box({0.0, 0.0}, {param, 1.0});
    case Family::kEllipse: return Domain::ellipsoid({0.0, 0.0}, {std::sqrt(param), 1.0 / std::sqrt(param)});
    case Family::kBall: return Domain::ball(2, 1.0);
  }
  throw InvalidArgument("unknown family");
}

bool SweepRecord::has_grid() const { return std::isfinite(lambda1_norm) && std::isfinite(lambda2_norm); }
bool SweepRecord::has_bounds() const { return std::isfinite(bound1) && std::isfinite(bound2); }

double normalization_factor(double measure, int dimension) {
  if (!(measure > 0.0)) throw InvalidArgument("measure must be positive");
  return std::pow(measure / geometry::unit_ball_volume(dimension), 2.0 / dimension);
}

void add_ladder(SweepRecord& rec, const eigensolve::LadderResult& ladder) {
  for (const auto& level : ladder.levels) {
    rec.grids.push_back(level.h);
    rec.lambda1_raw.push_back(level.lambda1);
    rec.lambda2_raw.push_back(level.lambda2);
  }
  rec.lambda1_x = ladder.lambda1.value;
  rec.lambda2_x = ladder.lambda2.value;
  const double factor = normalization_factor(rec.measure, 2);
  rec.lambda1_norm = rec.lambda1_x * factor;
  rec.lambda2_norm = rec.lambda2_x * factor;
  rec.error_est += factor * std::max(eigensolve::discretization_budget(ladder, 0),
                                     eigensolve::discretization_budget(ladder, 1));
  if (ladder.lambda1.status != discretize::ExtrapolationStatus::kOk ||
      ladder.lambda2.status != discretize::ExtrapolationStatus::kOk)
    rec.status = "warning: non-monotone grid sequence, finest value used";
}

SweepRecord make_record(const std::string& family, double param) { return empty_record(family, param); }

std::vector<SweepRecord> sweep(Family family, std::vector<double> params, const SweepConfig& config) {
  std::sort(params.begin(), params.end());
  std::vector<SweepRecord> out(params.size());
  detail::parallel_for(params.size(), config.jobs,
                       [&](std::size_t i) { out[i] = compute(family, params[i], config); });
  return out;
}

SweepRecord solve_record(const std::string& family, double param, const geometry::Domain& domain,
                         const SweepConfig& config) {
  SweepRecord rec = empty_record(family, param);
  try {
    if (domain.dimension() != 2) throw InvalidArgument("grid records need N = 2");
    rec.measure = geometry::measure(domain);
    rec.t_factor = std::sqrt(geometry::unit_ball_volume(2) / rec.measure);
    fill_grid(rec, domain, config);
  } catch (const std::exception& e) {
    rec.status = std::string("error: ") + e.what();
    rec.error_est = kNaN;
  }
  return rec;
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "family,param,h_list,lambda1_raw,lambda2_raw,lambda1_x,lambda2_x,measure,t,lambda1_norm,"
         "lambda2_norm,bound1,bound2,err\n";
  for (const auto& r : records) {
    out << r.family << ',' << format_number(r.param) << ',' << join(r.grids) << ',' << join(r.lambda1_raw) << ','
        << join(r.lambda2_raw) << ',' << cell(r.lambda1_x) << ',' << cell(r.lambda2_x) << ',' << cell(r.measure)
        << ',' << cell(r.t_factor) << ',' << cell(r.lambda1_norm) << ',' << cell(r.lambda2_norm) << ','
        << cell(r.bound1) << ',' << cell(r.bound2) << ',' << cell(r.error_est) << '\n';
  }
}

RegionReport region_check(const SweepRecord& record, int dimension) {
  const auto ball = analytic::ball_spectrum(dimension);
  const auto theta = analytic::theta_spectrum(dimension);
  const double tol = record.error_est;
  const double l1 = record.lambda1_norm;
  const double l2 = record.lambda2_norm;
  RegionReport report;
  if (!record.has_grid()) return report;
  report.faber_krahn.margin = l1 - ball.lambda1;
  report.faber_krahn.pass = report.faber_krahn.margin >= -tol;
  report.krahn_szego.margin = l2 - theta.second;
  report.krahn_szego.pass = report.krahn_szego.margin >= -tol;

  const double ratio = l2 / l1;
  const double ab = ball.lambda2 / ball.lambda1;
  const double ratio_tol = ratio * (tol / l1 + tol / l2);
  report.ashbaugh_benguria.margin = std::min(ratio - 1.0, ab - ratio);
  report.ashbaugh_benguria.pass = ratio >= 1.0 - ratio_tol && ratio <= ab + ratio_tol;
  return report;
}

ConeConstruction cone_construction(const geometry::Domain& base, double t, std::pair<double, double> base_pair,
                                   int max_fillers) {
  const int n = base.dimension();
  const double omega = geometry::unit_ball_volume(n);
  if (!(t >= 1.0) || !std::isfinite(t)) throw InvalidArgument("cone construction needs finite t >= 1");
  if (std::abs(geometry::measure(base) - omega) > 1e-9 * omega)
    throw InvalidArgument("cone construction needs a base of unit-ball measure");
  if (!(base_pair.first > 0.0 && base_pair.second >= base_pair.first))
    throw InvalidArgument("base eigenvalues must satisfy 0 < lambda1 <= lambda2");
  if (max_fillers < 1) throw InvalidArgument("max_fillers must be >= 1");

  const double lb = analytic::ball_spectrum(n).lambda1;
  const auto filler_lambda = [&](double tt, int m) {
    return lb * std::pow(m / (1.0 - std::pow(tt, -0.5 * n)), 2.0 / n);
  };

  ConeConstruction out{.domain = base};
  out.predicted_lambda1 = t * base_pair.first;
  out.predicted_lambda2 = t * base_pair.second;

  // filler_lambda(t, 1) - kDominanceMargin * t * lambda2 decreases in t.
  double lo = 1.0, hi = 2.0;
  const auto gap = [&](double tt) { return filler_lambda(tt, 1) - kDominanceMargin * tt * base_pair.second; };
  while (gap(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  out.single_ball_t_max = lo;
  if (t == 1.0) return out;

  const double target = kDominanceMargin * t * base_pair.second;
  int m = 1;
  while (filler_lambda(t, m) <= target) {
    if (++m > max_fillers)
      throw InvalidArgument("cone construction: fillers do not dominate with at most " +
                            std::to_string(max_fillers) + " balls; a single ball works only for 1 < t < " +
                            format_number(out.single_ball_t_max));
  }
  out.filler_count = m;
  out.filler_radius = std::pow((1.0 - std::pow(t, -0.5 * n)) / m, 1.0 / n);
  out.filler_lambda1 = filler_lambda(t, m);

  auto shrunk = geometry::Domain::scaled(1.0 / std::sqrt(t), base);
  const auto bb = geometry::bounding_ball(shrunk);
  std::vector<geometry::Domain> parts{shrunk};
  double cursor = bb.center[0] + bb.radius;
  double previous_diameter = 2.0 * bb.radius;
  for (int i = 0; i < m; ++i) {
    const double d = 2.0 * out.filler_radius;
    std::vector<double> centre = bb.center;
    centre[0] = cursor + 10.0 * (previous_diameter + d) + out.filler_radius;
    parts.push_back(geometry::Domain::ball(centre, out.filler_radius));
    cursor = centre[0] + out.filler_radius;
    previous_diameter = d;
  }
  out.domain = geometry::Domain::disjoint_union(std::move(parts));
  return out;
}

std::vector<CloudPoint> lower_boundary(const std::vector<CloudPoint>& cloud) {
  std::vector<CloudPoint> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < cloud.size() && !dominated; ++j)
      dominated = j != i && cloud[j].lambda1 < cloud[i].lambda1 && cloud[j].lambda2 < cloud[i].lambda2;
    if (!dominated) out.push_back(cloud[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const CloudPoint& a, const CloudPoint& b) {
    return a.lambda1 < b.lambda1 || (a.lambda1 == b.lambda1 && a.lambda2 < b.lambda2);
  });
  return out;
}

std::vector<CloudPoint> cloud_from_records(const std::vector<SweepRecord>& records) {
  std::vector<CloudPoint> out;
  for (const auto& r : records)
    if (r.has_grid()) out.push_back({r.lambda1_norm, r.lambda2_norm, r.family + "=" + format_number(r.param)});
  return out;
}

void write_boundary_csv(std::ostream& out, const std::vector<CloudPoint>& empirical_boundary, int dimension,
                        double lambda1_max) {
  const auto ball = analytic::ball_spectrum(dimension);
  const auto theta = analytic::theta_spectrum(dimension);
  const double ab = ball.lambda2 / ball.lambda1;
  out << "curve,lambda1,lambda2,slope\n";
  out << "P," << format_number(theta.first) << ',' << format_number(theta.second) << ",\n";
  out << "Q," << format_number(ball.lambda1) << ',' << format_number(ball.lambda2) << ",\n";
  out << "diagonal_halfline," << format_number(theta.first) << ',' << format_number(theta.second) << ",1\n";
  out << "diagonal_halfline," << format_number(lambda1_max) << ',' << format_number(lambda1_max) << ",1\n";
  out << "ashbaugh_benguria_halfline," << format_number(ball.lambda1) << ',' << format_number(ball.lambda2) << ','
      << format_number(ab) << '\n';
  out << "ashbaugh_benguria_halfline," << format_number(lambda1_max) << ',' << format_number(ab * lambda1_max)
      << ',' << format_number(ab) << '\n';
  for (const auto& p : empirical_boundary)
    out << "empirical lower boundary," << format_number(p.lambda1) << ',' << format_number(p.lambda2) << ",\n";
}

}  // namespace spectralgap::attainable
