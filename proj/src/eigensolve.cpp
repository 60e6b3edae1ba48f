#include "spectralgap/eigensolve.hpp"

#include <cmath>
#include <memory>
#include <random>

#include <Eigen/SparseCholesky>

namespace spectralgap::eigensolve {

namespace {

using ColMajorSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

class InverseApplier {
public:
  virtual ~InverseApplier() = default;
  /// Y = A^{-1} X; `ritz` (may be empty) seeds iterative solves.
  virtual void apply(const Eigen::MatrixXd& x, const Eigen::VectorXd& ritz, Eigen::MatrixXd& y) = 0;
};

class CholeskyApplier final : public InverseApplier {
public:
  explicit CholeskyApplier(const SparseMatrix& a) {
    const ColMajorSparse col = a;
    ldlt_.compute(col);
    if (ldlt_.info() != Eigen::Success || ldlt_.vectorD().minCoeff() <= 0.0)
      throw IndefiniteOperator("operator is not positive definite (LDL^T pivot <= 0)");
  }
  void apply(const Eigen::MatrixXd& x, const Eigen::VectorXd&, Eigen::MatrixXd& y) override {
    y = ldlt_.solve(x);
  }

private:
  Eigen::SimplicialLDLT<ColMajorSparse> ldlt_;
};

class CgApplier final : public InverseApplier {
public:
  CgApplier(const SparseMatrix& a, double rel_tol, int max_iterations)
      : a_(a), rel_tol_(rel_tol), max_iterations_(max_iterations) {}
  void apply(const Eigen::MatrixXd& x, const Eigen::VectorXd& ritz, Eigen::MatrixXd& y) override {
    y.resize(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      Eigen::VectorXd col = c < ritz.size() && ritz[c] > 0.0 ? Eigen::VectorXd(x.col(c) / ritz[c])
                                                             : Eigen::VectorXd::Zero(x.rows());
      const auto stats = conjugate_gradient(a_, x.col(c), col, rel_tol_, max_iterations_);
      if (stats.relative_residual > rel_tol_)
        throw ConvergenceFailure("inner conjugate-gradient solve did not reach its tolerance");
      y.col(c) = col;
    }
  }

private:
  const SparseMatrix& a_;
  double rel_tol_;
  int max_iterations_;
};

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v[at] < 0.0) v = -v;
}

}  // namespace

CgStats conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                           double rel_tol, int max_iterations) {
  const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  const double b_norm = b.norm();
  CgStats stats;
  if (b_norm == 0.0) {
    x.setZero();
    return stats;
  }
  Eigen::VectorXd r = b - a * x;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(b.size());
  double rz = r.dot(z);
  stats.relative_residual = r.norm() / b_norm;
  while (stats.relative_residual > rel_tol && stats.iterations < max_iterations) {
    ap.noalias() = a * p;
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) throw IndefiniteOperator("conjugate gradient met non-positive curvature");
    const double alpha = rz / curvature;
    x += alpha * p;
    r -= alpha * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++stats.iterations;
    stats.relative_residual = r.norm() / b_norm;
  }
  return stats;
}

EigenResult smallest_pairs(const SparseMatrix& a, const EigenOptions& options) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw InvalidArgument("operator must be square");
  if (options.k < 1) throw InvalidArgument("k must be >= 1");
  if (n < options.k) throw InvalidArgument("operator dimension below requested eigenpair count");
  if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (a.diagonal().minCoeff() <= 0.0) throw IndefiniteOperator("operator has a non-positive diagonal entry");

  const Eigen::Index p = std::min<Eigen::Index>(n, options.k + std::max(0, options.guard_vectors));
  const int k = options.k;

  std::unique_ptr<InverseApplier> inverse;
  if (options.inner == InnerSolver::kCholesky)
    inverse = std::make_unique<CholeskyApplier>(a);
  else
    inverse = std::make_unique<CgApplier>(a, options.cg_rel_tol, options.cg_max_iterations);

  Eigen::MatrixXd x(n, p);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::Index seeded = 0;
  if (options.initial_guess && options.initial_guess->rows() == n) {
    seeded = std::min<Eigen::Index>(p, options.initial_guess->cols());
    x.leftCols(seeded) = options.initial_guess->leftCols(seeded);
  }
  for (Eigen::Index c = seeded; c < p; ++c)
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = uniform(rng);
  x = orthonormalize(x);

  EigenResult result;
  result.tol = options.tol;
  Eigen::VectorXd ritz;
  Eigen::VectorXd previous;
  Eigen::MatrixXd y;

  for (int it = 1; it <= options.max_iterations; ++it) {
    inverse->apply(x, ritz, y);
    const Eigen::MatrixXd q = orthonormalize(y);
    const Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd h = q.transpose() * aq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    ritz = small.eigenvalues();
    if (ritz.minCoeff() <= 0.0) throw IndefiniteOperator("non-positive Ritz value: operator is not positive definite");
    x = q * small.eigenvectors();
    const Eigen::MatrixXd ax = aq * small.eigenvectors();

    result.iterations = it;
    result.values.assign(ritz.data(), ritz.data() + k);
    result.residuals.resize(static_cast<std::size_t>(k));
    bool done = previous.size() == ritz.size();
    for (int i = 0; i < k; ++i) {
      result.residuals[i] = (ax.col(i) - ritz[i] * x.col(i)).norm();
      if (done) {
        const bool stable = std::abs(ritz[i] - previous[i]) <= options.tol * ritz[i];
        const bool small_residual = result.residuals[i] <= options.tol * ritz[i];
        done = stable && small_residual;
      }
    }
    previous = ritz;
    if (done) {
      result.converged = true;
      break;
    }
  }

  result.vectors.clear();
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = x.col(i);
    fix_sign(v);
    result.vectors.push_back(std::move(v));
  }
  result.block = x;
  if (!result.converged)
    throw EigenNonConvergence("eigensolver did not converge within " + std::to_string(options.max_iterations) +
                                  " iterations",
                              std::move(result));
  return result;
}

EigenResult smallest_pairs(const discretize::DiscreteOperator& a, const EigenOptions& options) {
  return smallest_pairs(a.matrix, options);
}

RayleighResidual rayleigh_residual(const SparseMatrix& a, const Eigen::VectorXd& v) {
  const double vv = v.squaredNorm();
  if (!(vv > 0.0)) throw InvalidArgument("rayleigh quotient of the zero vector");
  const Eigen::VectorXd av = a * v;
  const double q = av.dot(v) / vv;
  return RayleighResidual{q, (av - q * v).norm() / std::sqrt(vv)};
}

double discretization_budget(const LadderResult& ladder, int which) {
  const auto& finest = ladder.levels.back();
  const double raw = which == 0 ? finest.lambda1 : finest.lambda2;
  const double extrapolated = which == 0 ? ladder.lambda1.value : ladder.lambda2.value;
  return std::abs(extrapolated - raw) + ladder.finest.tol * std::abs(extrapolated);
}

void validate_levels(const std::vector<double>& h_levels) {
  if (h_levels.empty()) throw InvalidArgument("at least one grid spacing is required");
  for (double h : h_levels)
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacings must be positive");
  for (std::size_t i = 1; i < h_levels.size(); ++i)
    if (std::abs(h_levels[i] * 2.0 - h_levels[i - 1]) > 1e-12 * h_levels[i - 1])
      throw InvalidArgument("grid spacings must halve from one level to the next");
}

LadderResult solve_ladder(const geometry::Domain& domain, const LadderOptions& options) {
  validate_levels(options.h_levels);
  std::vector<LevelSolve> levels;
  std::optional<discretize::Grid2D> previous_grid;
  EigenResult previous;
  for (double h : options.h_levels) {
    auto grid = discretize::build_grid(domain, h, options.grid);
    const auto op = discretize::assemble(grid);
    EigenOptions eig = options.eigen;
    if (previous_grid) {
      Eigen::MatrixXd guess(grid.size(), previous.block.cols());
      for (Eigen::Index c = 0; c < previous.block.cols(); ++c)
        guess.col(c) = discretize::prolongate(*previous_grid, previous.block.col(c), grid);
      eig.initial_guess = std::move(guess);
    }
    auto solved = smallest_pairs(op, eig);
    LevelSolve level;
    level.h = h;
    level.nodes = grid.size();
    level.lambda1 = solved.values.at(0);
    level.lambda2 = solved.values.size() > 1 ? solved.values[1] : std::nan("");
    for (double r : solved.residuals) level.max_residual = std::max(level.max_residual, r);
    level.iterations = solved.iterations;
    levels.push_back(level);
    previous_grid = std::move(grid);
    previous = std::move(solved);
  }

  auto extrapolate_component = [&](auto member) {
    const std::size_t m = levels.size();
    if (m == 1)
      return discretize::Extrapolation{levels[0].*member, std::nan(""), discretize::ExtrapolationStatus::kOk};
    if (m == 2) return discretize::extrapolate(levels[0].*member, levels[1].*member, options.order_hint);
    return discretize::extrapolate_fitted(levels[m - 3].*member, levels[m - 2].*member, levels[m - 1].*member);
  };
  return LadderResult{levels, extrapolate_component(&LevelSolve::lambda1),
                      extrapolate_component(&LevelSolve::lambda2), std::move(*previous_grid),
                      std::move(previous)};
}

}  // namespace spectralgap::eigensolve
