#pragma once

// Power-law fits of the lemma bounds and the limit-ratio verdict near P.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spectralgap/attainable.hpp"
#include "spectralgap/testfn.hpp"

namespace spectralgap::asymptotics {

struct SlopeFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  int n_points = 0;
};

/// Least squares of log y on log eps over pairs with eps inside the closed
/// window. Throws InvalidArgument on y <= 0 (naming eps) or fewer than 4
/// points.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pairs, std::pair<double, double> window);

/// 0.005 * sqrt(2)^k while <= eps_max, with eps_max appended if missed.
std::vector<double> default_eps_grid(double eps_max = 0.2);

/// Validates an eps grid: non-empty, strictly increasing, inside (0, 0.3].
void validate_eps_grid(const std::vector<double>& eps);

struct RatioPoint {
  double epsilon = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  bool valid = false;  ///< false when the denominator is not positive
};

struct RatioCurve {
  int dimension = 2;
  std::vector<RatioPoint> bound_path;
  std::vector<RatioPoint> grid_path;
  std::vector<std::string> flags;
};

/// (lambda2 - lambda2(Theta)) / (lambda1(Theta) - lambda1) per eps, from the
/// normalised lemma bounds and, where present, the normalised grid values.
RatioCurve ratio_curve(const std::vector<attainable::SweepRecord>& records, int dimension = 2);

/// CSV: path,epsilon,numerator,denominator,ratio,valid
void write_ratio_csv(std::ostream& out, const RatioCurve& curve);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Criteria {
  int max_inversions = 1;
  double decay_factor = 0.5;
  double min_exponent = 0.3;
  std::pair<double, double> fit_window{0.005, 0.1};  ///< eps range of the exponent fit
};

struct Verdict {
  bool pass = false;
  std::vector<Check> checks;
  std::optional<std::string> data_csv_path;
  SlopeFit fit;
};

/// PASS iff the bound-path ratio is decreasing up to `max_inversions`, its
/// smallest-eps value is at most decay_factor times the largest-eps value,
/// and its exponent fitted over `fit_window` is at least min_exponent. Throws InvalidArgument
/// with fewer than 4 valid bound-path points.
Verdict verify_theorem(const RatioCurve& curve, const Criteria& criteria = {});
Verdict verify_theorem(const std::vector<attainable::SweepRecord>& records, const Criteria& criteria = {},
                       int dimension = 2);

nlohmann::json to_json(const Verdict& verdict);

/// Bounds-only dumbbell records in dimension N (2 or 3).
std::vector<attainable::SweepRecord> bound_records(const std::vector<double>& eps, int dimension,
                                                   const quad::Config& quad, int jobs = 1);

struct LemmaPoint {
  double epsilon = 0.0;
  double quotient = 0.0;
  double gap = 0.0;  ///< deficit (lemma1) or excess (lemma2)
  double error = 0.0;
};

std::vector<LemmaPoint> lemma1_series(const std::vector<double>& eps, int dimension, const quad::Config& quad,
                                      int jobs = 1);
std::vector<LemmaPoint> lemma2_series(const std::vector<double>& eps, int dimension, const quad::Config& quad,
                                      int jobs = 1);
SlopeFit fit_series(const std::vector<LemmaPoint>& series, std::pair<double, double> window);

// ---------------------------------------------------------------------------

struct PipelineConfig {
  int dimension = 2;
  std::vector<double> eps_grid = default_eps_grid();
  std::vector<double> grid_eps{0.1, 0.2, 0.3};  ///< grid cross-checks (N = 2 only)
  eigensolve::LadderOptions ladder;
  quad::Config quad = testfn::lemma_quadrature();
  Criteria criteria;
  int jobs = 1;
};

struct GridCrossCheck {
  double epsilon = 0.0;
  testfn::Lemma1Result lemma1;
  testfn::Lemma2Result lemma2;
  testfn::OddExtensionReport odd;
  double lambda1_dumbbell = 0.0;     ///< extrapolated
  double tolerance_dumbbell = 0.0;   ///< budget of lambda1_dumbbell
  double tolerance_half = 0.0;       ///< budget of lambda1_half
  bool lemma1_consistent = false;    ///< lemma1 quotient >= lambda1 - tol
  bool lemma2_consistent = false;    ///< lemma2 quotient >= lambda1(half) - tol
};

struct PipelineResult {
  std::vector<attainable::SweepRecord> records;  ///< bound records then grid records
  RatioCurve curve;
  Verdict verdict;
  std::vector<GridCrossCheck> cross_checks;
  std::vector<Check> consistency;  ///< reported alongside the verdict, not part of PASS
};

/// Lemma quadratures over the eps grid, grid cross-checks, ratio curve and
/// verdict.
PipelineResult run_pipeline(const PipelineConfig& config);

nlohmann::json to_json(const PipelineResult& result);

}  // namespace spectralgap::asymptotics
