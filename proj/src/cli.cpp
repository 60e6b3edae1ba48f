#include "spectralgap/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "spectralgap/analytic.hpp"
#include "spectralgap/asymptotics.hpp"
#include "spectralgap/attainable.hpp"
#include "spectralgap/discretize.hpp"
#include "spectralgap/eigensolve.hpp"
#include "spectralgap/error.hpp"
#include "spectralgap/geometry.hpp"

namespace spectralgap::cli {

namespace {

using json = nlohmann::json;
using attainable::format_number;
using attainable::round_significant;

class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Flag values as typed; empty means "not given".
struct RawOptions {
  std::string domain, eps, param, matrix_out;
  std::string family, params;
  std::string eps_grid, eps_max, grid_eps, window, data_csv;
  std::string h, tol, quad_tol, seed, jobs, format, out, dim, inner;
};

struct RunConfig {
  std::string command;
  int dimension = 2;
  std::string domain;
  std::optional<double> eps;
  std::optional<double> param;
  std::vector<double> eps_grid;
  std::vector<double> grid_eps;
  std::pair<double, double> window{0.005, 0.1};
  eigensolve::LadderOptions ladder;
  quad::Config quad = testfn::lemma_quadrature();
  int jobs = 1;
  std::string format;
  std::optional<std::string> out;
  std::optional<std::string> data_csv;
  std::optional<std::string> matrix_out;
  std::vector<attainable::Family> families;
  std::vector<double> params;
};

json num(double v) { return std::isfinite(v) ? json(round_significant(v)) : json(); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

bool is_grid_command(const std::string& c) { return c == "eig" || c == "sweep" || c == "plotdata"; }

double positive(const std::string& text, const char* flag) {
  double v = 0.0;
  try {
    v = parse_number(text);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
  if (!(v > 0.0)) throw ConfigError(std::string(flag) + " must be positive");
  return v;
}

std::vector<double> list(const std::string& text, const char* flag) {
  try {
    return parse_list(text);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
}

void check_output_path(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " must not be empty");
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw ConfigError(std::string(flag) + ": directory '" + parent.string() + "' does not exist");
}

geometry::Domain named_domain(const RunConfig& cfg) {
  using geometry::Domain;
  const auto& name = cfg.domain;
  const int n = cfg.dimension;
  const double param = cfg.param.value_or(1.0);
  if (name == "ball") return Domain::ball(n, 1.0);
  if (name == "theta") return Domain::two_balls(n, std::pow(0.5, 1.0 / n));
  if (name == "dumbbell" || name == "half_dumbbell") {
    if (!cfg.eps) throw ConfigError("--domain " + name + " needs --eps");
    return name == "dumbbell" ? Domain::dumbbell(n, *cfg.eps) : Domain::half_dumbbell(n, *cfg.eps);
  }
  if (name == "rectangle") return attainable::family_domain(attainable::Family::kRectangle, param);
  if (name == "ellipse") return attainable::family_domain(attainable::Family::kEllipse, param);
  if (name == "two_balls_ratio") return attainable::family_domain(attainable::Family::kTwoBallsRatio, param);

  json doc;
  try {
    if (!name.empty() && name.front() == '{') {
      doc = json::parse(name);
    } else {
      std::ifstream in(name);
      if (!in) throw ConfigError("--domain: unknown name or unreadable file '" + name + "'");
      doc = json::parse(in);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("--domain: malformed JSON: ") + e.what());
  }
  try {
    return geometry::domain_from_json(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("--domain: malformed domain description: ") + e.what());
  }
}

RunConfig validate(const std::string& command, const RawOptions& raw) {
  RunConfig cfg;
  cfg.command = command;

  if (!raw.dim.empty()) {
    if (raw.dim != "2" && raw.dim != "3") throw ConfigError("--dim must be 2 or 3");
    cfg.dimension = raw.dim == "2" ? 2 : 3;
  }
  if (cfg.dimension == 3 && is_grid_command(command))
    throw ConfigError("'" + command + "' uses the grid solver, which needs N = 2; --dim 3 enables the analytic and "
                      "quadrature paths only");

  if (!raw.h.empty()) cfg.ladder.h_levels = list(raw.h, "--h");
  for (double h : cfg.ladder.h_levels)
    if (!(h > 0.0)) throw ConfigError("--h values must be positive");
  try {
    eigensolve::validate_levels(cfg.ladder.h_levels);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("--h: ") + e.what());
  }
  if (!raw.tol.empty()) cfg.ladder.eigen.tol = positive(raw.tol, "--tol");
  if (!raw.quad_tol.empty()) cfg.quad.rel_tol = positive(raw.quad_tol, "--quad-tol");
  try {
    cfg.ladder.eigen.seed = resolve_seed(raw.seed.empty() ? std::nullopt : std::optional<std::string>(raw.seed),
                                         std::getenv("SPECTRALGAP_SEED"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!raw.jobs.empty()) {
    const double j = positive(raw.jobs, "--jobs");
    if (j != std::floor(j) || j > 256) throw ConfigError("--jobs must be an integer in [1, 256]");
    cfg.jobs = static_cast<int>(j);
  }
  if (!raw.inner.empty()) {
    if (raw.inner == "cholesky") cfg.ladder.eigen.inner = eigensolve::InnerSolver::kCholesky;
    else if (raw.inner == "cg") cfg.ladder.eigen.inner = eigensolve::InnerSolver::kConjugateGradient;
    else throw ConfigError("--inner must be 'cholesky' or 'cg'");
  }

  const bool json_default = command == "eig" || command == "lemma1" || command == "lemma2" || command == "verify";
  cfg.format = raw.format.empty() ? (json_default ? "json" : "csv") : raw.format;
  if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("--format must be 'json' or 'csv'");
  if (command == "eig" && cfg.format != "json") throw ConfigError("eig emits JSON only");
  if (command == "plotdata" && cfg.format != "csv") throw ConfigError("plotdata emits CSV only");
  if (!raw.out.empty()) {
    if (command == "plotdata") check_output_path(raw.out + "_cloud.csv", "--out");
    else check_output_path(raw.out, "--out");
    cfg.out = raw.out;
  }
  if (!raw.data_csv.empty()) {
    check_output_path(raw.data_csv, "--data-csv");
    cfg.data_csv = raw.data_csv;
  }
  if (!raw.matrix_out.empty()) {
    check_output_path(raw.matrix_out, "--matrix-out");
    cfg.matrix_out = raw.matrix_out;
  }
  if (!raw.eps.empty()) cfg.eps = positive(raw.eps, "--eps");
  if (!raw.param.empty()) cfg.param = positive(raw.param, "--param");

  if (!raw.window.empty()) {
    const auto w = list(raw.window, "--window");
    if (w.size() != 2 || !(w[0] > 0.0 && w[1] > w[0])) throw ConfigError("--window needs two values 0 < a < b");
    cfg.window = {w[0], w[1]};
  }

  const bool eps_command = command == "lemma1" || command == "lemma2" || command == "ratio" || command == "verify";
  if (eps_command) {
    std::optional<double> eps_max;
    if (!raw.eps_max.empty()) {
      eps_max = positive(raw.eps_max, "--eps-max");
      if (*eps_max > 0.3) throw ConfigError("--eps-max must not exceed 0.3 (outside the validated regime)");
    }
    if (cfg.eps && !raw.eps_grid.empty()) throw ConfigError("give either --eps or --eps-grid, not both");
    if (cfg.eps) cfg.eps_grid = {*cfg.eps};
    else if (!raw.eps_grid.empty() && raw.eps_grid != "default") cfg.eps_grid = list(raw.eps_grid, "--eps-grid");
    else {
      try {
        cfg.eps_grid = asymptotics::default_eps_grid(eps_max.value_or(0.2));
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("--eps-max: ") + e.what());
      }
    }
    if (eps_max) std::erase_if(cfg.eps_grid, [&](double e) { return e > *eps_max; });
    try {
      asymptotics::validate_eps_grid(cfg.eps_grid);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--eps-grid: ") + e.what());
    }
    if (command == "verify" && cfg.dimension == 2) cfg.grid_eps = {0.1, 0.2, 0.3};
    if (!raw.grid_eps.empty()) {
      if (cfg.dimension == 3) throw ConfigError("--grid-eps needs N = 2");
      cfg.grid_eps = raw.grid_eps == "none" ? std::vector<double>{} : list(raw.grid_eps, "--grid-eps");
      if (!cfg.grid_eps.empty()) {
        try {
          asymptotics::validate_eps_grid(cfg.grid_eps);
        } catch (const InvalidArgument& e) {
          throw ConfigError(std::string("--grid-eps: ") + e.what());
        }
      }
    }
  }

  if (command == "eig") {
    if (raw.domain.empty()) throw ConfigError("eig needs --domain");
    cfg.domain = raw.domain;
    try {
      named_domain(cfg);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--domain: ") + e.what());
    }
  }

  if (command == "sweep" || command == "plotdata") {
    const std::string family = raw.family.empty() ? "all" : raw.family;
    try {
      cfg.families = family == "all" ? attainable::all_families()
                                     : std::vector<attainable::Family>{attainable::family_from_name(family)};
      if (!raw.params.empty()) {
        if (cfg.families.size() != 1) throw ConfigError("--params needs a single --family");
        cfg.params = list(raw.params, "--params");
        for (double p : cfg.params) attainable::family_domain(cfg.families.front(), p);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write '" + path + "'");
}

// Writes to --out when given, else to `out`.
void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (path) write_file(*path, text);
  else out << text;
}


std::string dump(const json& j) { return j.dump(2) + "\n"; }

attainable::SweepConfig sweep_config(const RunConfig& cfg) {
  attainable::SweepConfig sc;
  sc.ladder = cfg.ladder;
  sc.quad = cfg.quad;
  sc.jobs = cfg.jobs;
  return sc;
}

std::vector<attainable::SweepRecord> run_sweep(const RunConfig& cfg) {
  std::vector<attainable::SweepRecord> all;
  for (auto family : cfg.families) {
    auto params = cfg.params.empty() ? attainable::default_params(family) : cfg.params;
    auto records = attainable::sweep(family, params, sweep_config(cfg));
    all.insert(all.end(), records.begin(), records.end());
  }
  return all;
}

json record_json(const attainable::SweepRecord& r) {
  return {{"family", r.family},           {"param", num(r.param)},
          {"h_list", nums(r.grids)},      {"lambda1_raw", nums(r.lambda1_raw)},
          {"lambda2_raw", nums(r.lambda2_raw)}, {"lambda1_x", num(r.lambda1_x)},
          {"lambda2_x", num(r.lambda2_x)}, {"measure", num(r.measure)},
          {"t", num(r.t_factor)},         {"lambda1_norm", num(r.lambda1_norm)},
          {"lambda2_norm", num(r.lambda2_norm)}, {"bound1", num(r.bound1)},
          {"bound2", num(r.bound2)},      {"err", num(r.error_est)},
          {"status", r.status}};
}

json ratio_points(const std::vector<asymptotics::RatioPoint>& pts) {
  json a = json::array();
  for (const auto& p : pts)
    a.push_back({{"epsilon", num(p.epsilon)},
                 {"numerator", num(p.numerator)},
                 {"denominator", num(p.denominator)},
                 {"ratio", p.valid ? num(p.ratio) : json()},
                 {"valid", p.valid}});
  return a;
}

json fit_json(const asymptotics::SlopeFit& f) {
  return {{"exponent", num(f.exponent)},
          {"prefactor", num(f.prefactor)},
          {"r_squared", num(f.r_squared)},
          {"window", {num(f.window_min), num(f.window_max)}},
          {"n_points", f.n_points}};
}

int cmd_eig(const RunConfig& cfg, std::ostream& out) {
  const auto domain = named_domain(cfg);
  const auto ladder = eigensolve::solve_ladder(domain, cfg.ladder);
  const double measure = geometry::measure(domain);
  const double factor = attainable::normalization_factor(measure, 2);

  json levels = json::array();
  std::vector<double> raw1, raw2;
  for (const auto& l : ladder.levels) {
    levels.push_back({{"h", num(l.h)},
                      {"nodes", l.nodes},
                      {"lambda1", num(l.lambda1)},
                      {"lambda2", num(l.lambda2)},
                      {"iterations", l.iterations},
                      {"max_residual", num(l.max_residual)}});
    raw1.push_back(l.lambda1);
    raw2.push_back(l.lambda2);
  }
  const auto eig_json = [&](const discretize::Extrapolation& x, const std::vector<double>& raw, int which) {
    return json{{"raw", nums(raw)},
                {"extrapolated", num(x.value)},
                {"order", num(x.order)},
                {"status", x.status == discretize::ExtrapolationStatus::kOk ? "ok" : "non_monotone"},
                {"normalized", num(x.value * factor)},
                {"budget", num(eigensolve::discretization_budget(ladder, which))}};
  };
  json doc{{"command", "eig"},
           {"domain", geometry::to_json(domain)},
           {"h", nums(cfg.ladder.h_levels)},
           {"seed", cfg.ladder.eigen.seed},
           {"inner", cfg.ladder.eigen.inner == eigensolve::InnerSolver::kCholesky ? "cholesky" : "cg"},
           {"levels", levels},
           {"lambda1", eig_json(ladder.lambda1, raw1, 0)},
           {"lambda2", eig_json(ladder.lambda2, raw2, 1)},
           {"measure", num(measure)},
           {"t", num(std::sqrt(geometry::unit_ball_volume(2) / measure))}};
  if (cfg.matrix_out) {
    std::ostringstream m;
    discretize::write_coordinate(m, discretize::assemble(ladder.finest_grid));
    write_file(*cfg.matrix_out, m.str());
    doc["matrix_out"] = *cfg.matrix_out;
  }
  emit(cfg.out, dump(doc), out);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto records = run_sweep(cfg);
  if (cfg.format == "csv") {
    std::ostringstream s;
    attainable::write_csv(s, records);
    emit(cfg.out, s.str(), out);
  } else {
    json a = json::array();
    for (const auto& r : records) a.push_back(record_json(r));
    emit(cfg.out, dump(a), out);
  }
  return 0;
}

int cmd_lemma(const RunConfig& cfg, std::ostream& out, bool first) {
  const auto series = first ? asymptotics::lemma1_series(cfg.eps_grid, cfg.dimension, cfg.quad, cfg.jobs)
                            : asymptotics::lemma2_series(cfg.eps_grid, cfg.dimension, cfg.quad, cfg.jobs);
  const char* gap = first ? "deficit" : "excess";
  const double rate = first ? 0.5 * cfg.dimension : 0.5 * (cfg.dimension + 1);
  if (cfg.format == "csv") {
    std::ostringstream s;
    s << "epsilon,quotient," << gap << ",scaled_" << gap << ",error\n";
    for (const auto& p : series)
      s << format_number(p.epsilon) << ',' << format_number(p.quotient) << ',' << format_number(p.gap) << ','
        << format_number(p.gap / std::pow(p.epsilon, rate)) << ',' << format_number(p.error) << '\n';
    emit(cfg.out, s.str(), out);
    return 0;
  }
  json pts = json::array();
  for (const auto& p : series)
    pts.push_back({{"epsilon", num(p.epsilon)},
                   {"quotient", num(p.quotient)},
                   {gap, num(p.gap)},
                   {std::string("scaled_") + gap, num(p.gap / std::pow(p.epsilon, rate))},
                   {"error", num(p.error)}});
  json doc{{"command", first ? "lemma1" : "lemma2"},
           {"dimension", cfg.dimension},
           {"rate", num(rate)},
           {"points", pts},
           {"fit", nullptr}};
  try {
    doc["fit"] = fit_json(asymptotics::fit_series(series, cfg.window));
  } catch (const InvalidArgument& e) {
    doc["fit_note"] = e.what();
  }
  emit(cfg.out, dump(doc), out);
  return 0;
}

std::vector<attainable::SweepRecord> grid_records(const RunConfig& cfg) {
  std::vector<attainable::SweepRecord> records;
  if (cfg.grid_eps.empty()) return records;
  auto sc = sweep_config(cfg);
  sc.bounds = false;
  records = attainable::sweep(attainable::Family::kDumbbell, cfg.grid_eps, sc);
  for (const auto& r : records)
    if (r.failed()) throw ConvergenceFailure("grid solve failed at eps = " + format_number(r.param) + ": " + r.status);
  return records;
}

int cmd_ratio(const RunConfig& cfg, std::ostream& out) {
  auto records = asymptotics::bound_records(cfg.eps_grid, cfg.dimension, cfg.quad, cfg.jobs);
  for (const auto& r : records)
    if (r.failed()) throw ConvergenceFailure("lemma quadrature failed at eps = " + format_number(r.param));
  const auto grid = grid_records(cfg);
  records.insert(records.end(), grid.begin(), grid.end());
  const auto curve = asymptotics::ratio_curve(records, cfg.dimension);
  if (cfg.format == "csv") {
    std::ostringstream s;
    asymptotics::write_ratio_csv(s, curve);
    emit(cfg.out, s.str(), out);
  } else {
    json flags = json::array();
    for (const auto& f : curve.flags) flags.push_back(f);
    emit(cfg.out,
         dump({{"command", "ratio"},
               {"dimension", cfg.dimension},
               {"bound_path", ratio_points(curve.bound_path)},
               {"grid_path", ratio_points(curve.grid_path)},
               {"flags", flags}}),
         out);
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  asymptotics::PipelineConfig pc;
  pc.dimension = cfg.dimension;
  pc.eps_grid = cfg.eps_grid;
  pc.grid_eps = cfg.grid_eps;
  pc.ladder = cfg.ladder;
  pc.quad = cfg.quad;
  pc.jobs = cfg.jobs;
  pc.criteria.fit_window = cfg.window;
  auto result = asymptotics::run_pipeline(pc);

  std::ostringstream csv;
  asymptotics::write_ratio_csv(csv, result.curve);
  if (cfg.data_csv) {
    write_file(*cfg.data_csv, csv.str());
    result.verdict.data_csv_path = *cfg.data_csv;
  }
  if (cfg.format == "csv") {
    emit(cfg.out, csv.str(), out);
  } else {
    auto doc = asymptotics::to_json(result);
    doc["dimension"] = cfg.dimension;
    doc["bound_path"] = ratio_points(result.curve.bound_path);
    doc["grid_path"] = ratio_points(result.curve.grid_path);
    emit(cfg.out, dump(doc), out);
  }
  return result.verdict.pass ? 0 : 1;
}

int cmd_plotdata(const RunConfig& cfg, std::ostream& out) {
  const auto records = run_sweep(cfg);
  const auto boundary = attainable::lower_boundary(attainable::cloud_from_records(records));
  const std::string prefix = cfg.out.value_or("attainable");
  const std::string cloud_path = prefix + "_cloud.csv";
  const std::string boundary_path = prefix + "_boundary.csv";
  std::ostringstream cloud, curves;
  attainable::write_csv(cloud, records);
  attainable::write_boundary_csv(curves, boundary, 2);
  write_file(cloud_path, cloud.str());
  write_file(boundary_path, curves.str());
  int failed = 0;
  for (const auto& r : records) failed += r.failed() ? 1 : 0;
  out << dump({{"command", "plotdata"},
               {"cloud_csv", cloud_path},
               {"boundary_csv", boundary_path},
               {"records", records.size()},
               {"failed_records", failed},
               {"empirical_lower_boundary_points", boundary.size()}});
  return 0;
}

void add_common(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--h", raw.h, "grid spacings, e.g. 1/32,1/64,1/128");
  sub->add_option("--tol", raw.tol, "eigensolver tolerance");
  sub->add_option("--quad-tol", raw.quad_tol, "quadrature relative tolerance");
  sub->add_option("--seed", raw.seed, "seed of the start block (overrides SPECTRALGAP_SEED)");
  sub->add_option("--jobs", raw.jobs, "worker threads");
  sub->add_option("--format", raw.format, "json or csv");
  sub->add_option("--out", raw.out, "output file (plotdata: file prefix)");
  sub->add_option("--dim", raw.dim, "ambient dimension, 2 or 3");
  sub->add_option("--inner", raw.inner, "inner solver: cholesky or cg");
}

void add_eps(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--eps-grid", raw.eps_grid, "comma-separated eps values, or 'default'");
  sub->add_option("--eps-max", raw.eps_max, "largest eps, at most 0.3");
  sub->add_option("--window", raw.window, "eps window of the slope fit, e.g. 0.005,0.1");
}

void report_error(std::ostream& err, const std::string& command, const std::string& type, const std::string& msg) {
  err << json{{"error", {{"command", command}, {"type", type}, {"message", msg}}}}.dump() << "\n";
}

}  // namespace

double parse_number(const std::string& text) {
  const auto parse = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + text + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw InvalidArgument("not a number: '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse(text);
  const double num = parse(text.substr(0, slash));
  const double den = parse(text.substr(slash + 1));
  if (den == 0.0) throw InvalidArgument("zero denominator in '" + text + "'");
  return num / den;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty() || (!text.empty() && text.back() == ','))
    throw InvalidArgument("malformed list '" + text + "'");
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::string>& flag, const char* env_value) {
  const auto parse = [](const std::string& s, const char* source) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 20)
      throw InvalidArgument(std::string(source) + " must be a non-negative integer, got '" + s + "'");
    try {
      return static_cast<std::uint64_t>(std::stoull(s));
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(source) + " is out of range");
    }
  };
  if (flag) return parse(*flag, "--seed");
  if (env_value != nullptr) return parse(env_value, "SPECTRALGAP_SEED");
  return eigensolve::kDefaultSeed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet eigenvalue toolkit for the (lambda1, lambda2) attainable set", "spectralgap"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1, 1);
  RawOptions raw;

  auto* eig = app.add_subcommand("eig", "first two eigenvalues of a planar domain on a grid ladder");
  add_common(eig, raw);
  eig->add_option("--domain", raw.domain,
                  "ball, theta, dumbbell, half_dumbbell, rectangle, ellipse, two_balls_ratio, a JSON file or "
                  "inline JSON");
  eig->add_option("--eps", raw.eps, "dumbbell parameter");
  eig->add_option("--param", raw.param, "family parameter (aspect ratio or radius ratio)");
  eig->add_option("--matrix-out", raw.matrix_out, "write the finest operator in coordinate format");

  auto* sweep = app.add_subcommand("sweep", "normalised eigenvalue pairs over domain families");
  add_common(sweep, raw);
  sweep->add_option("--family", raw.family, "dumbbell, two_balls_ratio, rectangle, ellipse, ball or all");
  sweep->add_option("--params", raw.params, "comma-separated family parameters");

  auto* lemma1 = app.add_subcommand("lemma1", "Rayleigh quotient of the corrected ball eigenfunction");
  auto* lemma2 = app.add_subcommand("lemma2", "Rayleigh quotient of the cut-off half-ball eigenfunction");
  for (auto* sub : {lemma1, lemma2}) {
    add_common(sub, raw);
    add_eps(sub, raw);
    sub->add_option("--eps", raw.eps, "single eps value");
  }

  auto* ratio = app.add_subcommand("ratio", "limit-ratio curve near P");
  auto* verify = app.add_subcommand("verify", "full pipeline and PASS/FAIL verdict");
  for (auto* sub : {ratio, verify}) {
    add_common(sub, raw);
    add_eps(sub, raw);
    sub->add_option("--grid-eps", raw.grid_eps, "eps values of the grid path, or 'none'");
  }
  verify->add_option("--data-csv", raw.data_csv, "also write the ratio-curve CSV here");

  auto* plotdata = app.add_subcommand("plotdata", "attainable-cloud and region-boundary CSVs");
  add_common(plotdata, raw);
  plotdata->add_option("--family", raw.family, "restrict the cloud to one family");

  std::string command;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    report_error(err, command, "config", e.what());
    return command == "verify" ? 2 : 1;
  }
  command = app.get_subcommands().front()->get_name();
  const int infra = command == "verify" ? 2 : 1;

  RunConfig cfg;
  try {
    cfg = validate(command, raw);
  } catch (const std::exception& e) {
    report_error(err, command, "config", e.what());
    return infra;
  }

  try {
    std::ostringstream buffer;
    int code = 0;
    if (command == "eig") code = cmd_eig(cfg, buffer);
    else if (command == "sweep") code = cmd_sweep(cfg, buffer);
    else if (command == "lemma1") code = cmd_lemma(cfg, buffer, true);
    else if (command == "lemma2") code = cmd_lemma(cfg, buffer, false);
    else if (command == "ratio") code = cmd_ratio(cfg, buffer);
    else if (command == "verify") code = cmd_verify(cfg, buffer);
    else code = cmd_plotdata(cfg, buffer);
    out << buffer.str();
    return code;
  } catch (const IoError& e) {
    report_error(err, command, "io", e.what());
  } catch (const InvalidArgument& e) {
    report_error(err, command, "config", e.what());
  } catch (const std::exception& e) {
    report_error(err, command, "solver", e.what());
  }
  return infra;
}

}  // namespace spectralgap::cli
