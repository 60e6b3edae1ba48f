#pragma once

// Five-point finite-difference Dirichlet Laplacian on a uniform lattice
// masked by domain membership (planar domains only). Nodes outside the
// domain are dropped, which imposes the homogeneous boundary condition.

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "spectralgap/geometry.hpp"

namespace spectralgap::discretize {

struct LatticeIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

struct GridOptions {
  geometry::Junction junction = geometry::Junction::kIncluded;
  int min_active_nodes = 100;
};

/// Lattice points (i h, j h) that lie inside a domain. The lattice is
/// anchored at the origin so the plane {x1 = 0} is a grid line.
class Grid2D {
public:
  /// Empty grid with no nodes.
  Grid2D() = default;

  /// Explicit node list, mainly for tests and hand-built operators.
  static Grid2D from_nodes(double h, std::vector<LatticeIndex> nodes);

  double h() const { return h_; }
  const geometry::BoundingBox& bbox() const { return bbox_; }
  const std::vector<LatticeIndex>& active() const { return active_; }
  int size() const { return static_cast<int>(active_.size()); }

  /// Matrix row of lattice point (i, j), or -1 when inactive/outside.
  int index_of(int i, int j) const;
  std::array<double, 2> coordinate(int row) const;

private:
  friend Grid2D build_grid(const geometry::Domain&, double, const GridOptions&);
  Grid2D(double h, int i_min, int i_max, int j_min, int j_max);
  void finalize();

  double h_ = 0.0;
  int i_min_ = 0;
  int i_max_ = 0;
  int j_min_ = 0;
  int j_max_ = 0;
  geometry::BoundingBox bbox_;
  std::vector<LatticeIndex> active_;
  std::vector<int> index_;  // dense over the lattice box
};

/// Nodes ordered lexicographically by (i, j). Throws InvalidArgument for
/// N != 2, non-positive h, or fewer than `min_active_nodes` (and never
/// accepts zero nodes).
Grid2D build_grid(const geometry::Domain& domain, double h, const GridOptions& options = {});

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct DiscreteOperator {
  int n = 0;
  double h = 0.0;
  SparseMatrix matrix;  ///< compressed sparse rows
};

DiscreteOperator assemble(const Grid2D& grid);

/// Writes the operator as a MatrixMarket coordinate file (1-based).
void write_coordinate(std::ostream& out, const DiscreteOperator& op);

struct GridSample {
  double value = 0.0;
  std::array<double, 2> gradient{};
};

/// Bilinear interpolant of nodal values (zero at inactive nodes).
GridSample interpolate(const Grid2D& grid, const Eigen::VectorXd& values, double x, double y);

/// Interpolates nodal values from `coarse` onto the nodes of `fine`.
Eigen::VectorXd prolongate(const Grid2D& coarse, const Eigen::VectorXd& values, const Grid2D& fine);

enum class ExtrapolationStatus { kOk, kNonMonotone };

struct Extrapolation {
  double value = 0.0;
  double order = 0.0;  ///< convergence order used (NaN when not applicable)
  ExtrapolationStatus status = ExtrapolationStatus::kOk;
};

/// Richardson step for spacings h and h/2 with a known order p.
Extrapolation extrapolate(double lambda_h, double lambda_h2, double order);

/// Order fitted from three levels h, h/2, h/4, then Richardson on the two
/// finest. A non-monotone or non-contracting sequence is flagged and the
/// finest value returned unchanged.
Extrapolation extrapolate_fitted(double lambda_h, double lambda_h2, double lambda_h4);

}  // namespace spectralgap::discretize
