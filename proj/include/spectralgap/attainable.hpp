#pragma once

// Sweeps over families of planar domains, normalised to the measure of the
// unit ball, producing points of the (lambda1, lambda2) attainable set, plus
// the region checks and the scaling construction that go with it.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spectralgap/eigensolve.hpp"
#include "spectralgap/geometry.hpp"
#include "spectralgap/quadrature.hpp"
#include "spectralgap/testfn.hpp"

namespace spectralgap::attainable {

enum class Family {
  kDumbbell,       ///< param: eps
  kTwoBallsRatio,  ///< param: radius ratio rho in (0, 1]
  kRectangle,      ///< param: aspect ratio a >= 1
  kEllipse,        ///< param: aspect ratio a >= 1
  kBall,           ///< param ignored
};

std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// Unnormalised family member for a parameter value (N = 2).
geometry::Domain family_domain(Family family, double param);

/// Default parameter lists of the sweep suite.
std::vector<double> default_params(Family family);
std::vector<Family> all_families();

struct SweepConfig {
  eigensolve::LadderOptions ladder;
  quad::Config quad = testfn::lemma_quadrature();
  int jobs = 1;
  bool grid = true;    ///< run grid eigensolves
  bool bounds = true;  ///< lemma quotients (dumbbell family only)
};

struct SweepRecord {
  std::string family;
  double param = 0.0;
  std::vector<double> grids;
  std::vector<double> lambda1_raw;
  std::vector<double> lambda2_raw;
  double lambda1_x = 0.0;
  double lambda2_x = 0.0;
  double measure = 0.0;
  double t_factor = 1.0;
  double lambda1_norm = 0.0;
  double lambda2_norm = 0.0;
  double bound1 = 0.0;  ///< normalised lemma1 quotient (NaN when absent)
  double bound2 = 0.0;  ///< normalised lemma2 quotient (NaN when absent)
  double error_est = 0.0;
  std::string status = "ok";  ///< "ok", an extrapolation warning, or the failure message

  bool has_grid() const;
  bool has_bounds() const;
  bool failed() const { return status.rfind("error", 0) == 0; }
};

/// (|Omega| / omega_N)^{2/N}: multiplies eigenvalues of Omega to give those
/// of its unit-measure rescaling.
double normalization_factor(double measure, int dimension);

/// One record per parameter, sorted by parameter. Per-record failures are
/// recorded in `status` and the sweep continues. Output is independent of
/// `jobs`.
std::vector<SweepRecord> sweep(Family family, std::vector<double> params, const SweepConfig& config);

/// Record with every numeric field unset (NaN, error_est 0) and status "ok".
/// Failed records also carry a NaN error_est.
SweepRecord make_record(const std::string& family, double param);

/// Copies a planar ladder into the record's grid fields and adds its
/// normalised discretisation budget to error_est. `measure` must be set.
void add_ladder(SweepRecord& record, const eigensolve::LadderResult& ladder);

/// Record for an arbitrary planar domain (grid path only).
SweepRecord solve_record(const std::string& family, double param, const geometry::Domain& domain,
                         const SweepConfig& config);

/// Writes the sweep CSV with its fixed header; 12 significant digits,
/// per-grid lists joined with ';'.
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);

struct CheckOutcome {
  bool pass = false;
  double margin = 0.0;  ///< signed distance to the violated side (>= 0 inside)
};

struct RegionReport {
  CheckOutcome faber_krahn;        ///< lambda1 >= lambda1(B)
  CheckOutcome krahn_szego;        ///< lambda2 >= lambda2(Theta)
  CheckOutcome ashbaugh_benguria;  ///< 1 <= lambda2/lambda1 <= lambda2(B)/lambda1(B)
  bool all_pass() const { return faber_krahn.pass && krahn_szego.pass && ashbaugh_benguria.pass; }
};

/// Region inclusion checks with `record.error_est` as slack (propagated to
/// the ratio).
RegionReport region_check(const SweepRecord& record, int dimension = 2);

struct ConeConstruction {
  geometry::Domain domain;
  int filler_count = 0;      ///< equal far balls added
  double filler_radius = 0.0;
  double filler_lambda1 = 0.0;
  double predicted_lambda1 = 0.0;  ///< t * lambda1(base)
  double predicted_lambda2 = 0.0;  ///< t * lambda2(base)
  /// Largest t for which a single filler ball still dominates.
  double single_ball_t_max = 0.0;
};

/// Realises (t lambda1, t lambda2) for t >= 1: the base shrunk by t^{-1/2}
/// plus far balls filling the lost measure, chosen few enough (at most
/// `max_fillers`) but small enough that their lambda1 exceeds t lambda2(base).
/// `base_pair` are the eigenvalues of the unit-measure base.
ConeConstruction cone_construction(const geometry::Domain& base, double t, std::pair<double, double> base_pair,
                                   int max_fillers = 64);

struct CloudPoint {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::string label;
};

/// Empirical lower boundary: points not radially dominated toward the
/// origin by another point of the cloud, sorted by lambda1.
std::vector<CloudPoint> lower_boundary(const std::vector<CloudPoint>& cloud);
std::vector<CloudPoint> cloud_from_records(const std::vector<SweepRecord>& records);

/// Boundary curves of the admissible region: P, Q, the diagonal half-line
/// and the Ashbaugh–Benguria half-line, plus the empirical lower boundary.
void write_boundary_csv(std::ostream& out, const std::vector<CloudPoint>& empirical_boundary, int dimension = 2,
                        double lambda1_max = 40.0);

/// %.12g formatting used by every emitted table.
std::string format_number(double value);

/// The double nearest to format_number(value); non-finite values pass through.
double round_significant(double value);

}  // namespace spectralgap::attainable
