#pragma once

// Smallest eigenpairs of sparse symmetric positive-definite operators by
// block inverse iteration with Rayleigh–Ritz, plus a multi-level driver
// that solves a domain on several grids and extrapolates.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spectralgap/discretize.hpp"
#include "spectralgap/error.hpp"

namespace spectralgap::eigensolve {

using discretize::SparseMatrix;

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// How A^{-1} x is applied inside the iteration.
enum class InnerSolver {
  kCholesky,           ///< sparse LDL^T factorization, reused every step
  kConjugateGradient,  ///< Jacobi-preconditioned CG to `cg_rel_tol`
};

struct EigenOptions {
  int k = 2;
  double tol = 1e-8;
  int max_iterations = 500;
  int guard_vectors = 4;  ///< extra block columns beyond k
  std::uint64_t seed = kDefaultSeed;
  InnerSolver inner = InnerSolver::kCholesky;
  double cg_rel_tol = 1e-10;
  int cg_max_iterations = 20000;
  /// Optional starting columns (n x m); remaining columns are pseudo-random.
  std::optional<Eigen::MatrixXd> initial_guess;
};

struct EigenResult {
  std::vector<double> values;  ///< ascending
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> residuals;  ///< ||A v - lambda v|| with ||v|| = 1
  int iterations = 0;
  double tol = 0.0;
  bool converged = false;
  /// Full Ritz block of the last iterate, useful to warm-start a finer grid.
  Eigen::MatrixXd block;
};

class IndefiniteOperator : public Error {
public:
  using Error::Error;
};

/// Raised when the iteration budget is exhausted; carries the best iterate.
class EigenNonConvergence : public ConvergenceFailure {
public:
  EigenNonConvergence(const std::string& what, EigenResult best)
      : ConvergenceFailure(what), best_(std::move(best)) {}
  const EigenResult& best() const { return best_; }

private:
  EigenResult best_;
};

EigenResult smallest_pairs(const SparseMatrix& a, const EigenOptions& options = {});
EigenResult smallest_pairs(const discretize::DiscreteOperator& a, const EigenOptions& options = {});

struct RayleighResidual {
  double quotient = 0.0;
  double residual = 0.0;  ///< ||A v - q v|| / ||v||
};

RayleighResidual rayleigh_residual(const SparseMatrix& a, const Eigen::VectorXd& v);

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves A x = b by Jacobi-preconditioned conjugate gradients starting from
/// the contents of x. Throws IndefiniteOperator on non-positive curvature.
CgStats conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                           double rel_tol, int max_iterations);

// ---------------------------------------------------------------------------

struct LadderOptions {
  std::vector<double> h_levels{1.0 / 32, 1.0 / 64, 1.0 / 128};
  EigenOptions eigen;
  discretize::GridOptions grid;
  double order_hint = 2.0;  ///< used when exactly two levels are given
};

struct LevelSolve {
  double h = 0.0;
  int nodes = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double max_residual = 0.0;
  int iterations = 0;
};

struct LadderResult {
  std::vector<LevelSolve> levels;
  discretize::Extrapolation lambda1;
  discretize::Extrapolation lambda2;
  /// Finest-level eigenpairs.
  discretize::Grid2D finest_grid;
  EigenResult finest;
};

/// Error budget of an extrapolated eigenvalue (which = 0 or 1): distance
/// between the extrapolated and finest raw values plus the solver tolerance.
double discretization_budget(const LadderResult& ladder, int which);

/// Validates that successive spacings halve exactly (relative 1e-12).
void validate_levels(const std::vector<double>& h_levels);

/// Solves the domain on every spacing (coarse to fine, each level warm
/// started by prolongating the previous Ritz block) and extrapolates.
LadderResult solve_ladder(const geometry::Domain& domain, const LadderOptions& options = {});

}  // namespace spectralgap::eigensolve
