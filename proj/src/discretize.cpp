#include "spectralgap/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "spectralgap/error.hpp"

namespace spectralgap::discretize {

Grid2D::Grid2D(double h, int i_min, int i_max, int j_min, int j_max)
    : h_(h), i_min_(i_min), i_max_(i_max), j_min_(j_min), j_max_(j_max) {
  bbox_.lower = {i_min * h, j_min * h};
  bbox_.upper = {i_max * h, j_max * h};
  index_.assign(static_cast<std::size_t>(i_max - i_min + 1) * static_cast<std::size_t>(j_max - j_min + 1), -1);
}

void Grid2D::finalize() {
  std::sort(active_.begin(), active_.end(), [](const LatticeIndex& a, const LatticeIndex& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  std::fill(index_.begin(), index_.end(), -1);
  const int width = j_max_ - j_min_ + 1;
  for (std::size_t row = 0; row < active_.size(); ++row) {
    const auto& p = active_[row];
    index_[static_cast<std::size_t>(p.i - i_min_) * width + (p.j - j_min_)] = static_cast<int>(row);
  }
}

Grid2D Grid2D::from_nodes(double h, std::vector<LatticeIndex> nodes) {
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  if (nodes.empty()) throw InvalidArgument("grid needs at least one node");
  int i_min = std::numeric_limits<int>::max(), i_max = std::numeric_limits<int>::min();
  int j_min = i_min, j_max = i_max;
  for (const auto& p : nodes) {
    i_min = std::min(i_min, p.i);
    i_max = std::max(i_max, p.i);
    j_min = std::min(j_min, p.j);
    j_max = std::max(j_max, p.j);
  }
  Grid2D grid(h, i_min - 2, i_max + 2, j_min - 2, j_max + 2);
  grid.active_ = std::move(nodes);
  grid.finalize();
  return grid;
}

int Grid2D::index_of(int i, int j) const {
  if (index_.empty() || i < i_min_ || i > i_max_ || j < j_min_ || j > j_max_) return -1;
  return index_[static_cast<std::size_t>(i - i_min_) * (j_max_ - j_min_ + 1) + (j - j_min_)];
}

std::array<double, 2> Grid2D::coordinate(int row) const {
  const auto& p = active_.at(static_cast<std::size_t>(row));
  return {p.i * h_, p.j * h_};
}

Grid2D build_grid(const geometry::Domain& domain, double h, const GridOptions& options) {
  if (domain.dimension() != 2) throw InvalidArgument("grid discretization supports N = 2 only");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  const auto box = geometry::bounding_box(domain);
  const int i_min = static_cast<int>(std::floor(box.lower[0] / h)) - 2;
  const int i_max = static_cast<int>(std::ceil(box.upper[0] / h)) + 2;
  const int j_min = static_cast<int>(std::floor(box.lower[1] / h)) - 2;
  const int j_max = static_cast<int>(std::ceil(box.upper[1] / h)) + 2;
  Grid2D grid(h, i_min, i_max, j_min, j_max);
  for (int i = i_min; i <= i_max; ++i)
    for (int j = j_min; j <= j_max; ++j) {
      const std::array<double, 2> x{i * h, j * h};
      if (geometry::contains(domain, x, options.junction)) grid.active_.push_back({i, j});
    }
  if (grid.active_.empty()) throw InvalidArgument("grid has no active nodes inside the domain");
  if (static_cast<int>(grid.active_.size()) < options.min_active_nodes)
    throw InvalidArgument("grid too coarse: " + std::to_string(grid.active_.size()) + " active nodes, need " +
                          std::to_string(options.min_active_nodes));
  grid.finalize();
  return grid;
}

DiscreteOperator assemble(const Grid2D& grid) {
  const int n = grid.size();
  const double h2 = grid.h() * grid.h();
  const double diag = 4.0 / h2;
  const double off = -1.0 / h2;
  std::vector<Eigen::Triplet<double, int>> entries;
  entries.reserve(static_cast<std::size_t>(n) * 5);
  constexpr std::array<std::array<int, 2>, 4> kNeighbours{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
  for (int row = 0; row < n; ++row) {
    const auto& p = grid.active()[static_cast<std::size_t>(row)];
    for (const auto& d : kNeighbours) {
      const int col = grid.index_of(p.i + d[0], p.j + d[1]);
      if (col >= 0) entries.emplace_back(row, col, off);
    }
    entries.emplace_back(row, row, diag);
  }
  DiscreteOperator op;
  op.n = n;
  op.h = grid.h();
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  return op;
}

void write_coordinate(std::ostream& out, const DiscreteOperator& op) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << op.n << ' ' << op.n << ' ' << op.matrix.nonZeros() << '\n';
  out.precision(17);
  for (int row = 0; row < op.matrix.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(op.matrix, row); it; ++it)
      out << row + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

GridSample interpolate(const Grid2D& grid, const Eigen::VectorXd& values, double x, double y) {
  const double h = grid.h();
  const double fx = x / h;
  const double fy = y / h;
  const int i0 = static_cast<int>(std::floor(fx));
  const int j0 = static_cast<int>(std::floor(fy));
  const double s = fx - i0;
  const double t = fy - j0;
  auto at = [&](int i, int j) {
    const int row = grid.index_of(i, j);
    return row < 0 ? 0.0 : values[row];
  };
  const double v00 = at(i0, j0), v10 = at(i0 + 1, j0), v01 = at(i0, j0 + 1), v11 = at(i0 + 1, j0 + 1);
  GridSample out;
  out.value = (1 - s) * (1 - t) * v00 + s * (1 - t) * v10 + (1 - s) * t * v01 + s * t * v11;
  out.gradient[0] = ((1 - t) * (v10 - v00) + t * (v11 - v01)) / h;
  out.gradient[1] = ((1 - s) * (v01 - v00) + s * (v11 - v10)) / h;
  return out;
}

Eigen::VectorXd prolongate(const Grid2D& coarse, const Eigen::VectorXd& values, const Grid2D& fine) {
  Eigen::VectorXd out(fine.size());
  for (int row = 0; row < fine.size(); ++row) {
    const auto x = fine.coordinate(row);
    out[row] = interpolate(coarse, values, x[0], x[1]).value;
  }
  return out;
}

Extrapolation extrapolate(double lambda_h, double lambda_h2, double order) {
  if (!(order > 0.0)) throw InvalidArgument("extrapolation order must be positive");
  return Extrapolation{lambda_h2 + (lambda_h2 - lambda_h) / (std::pow(2.0, order) - 1.0), order,
                       ExtrapolationStatus::kOk};
}

Extrapolation extrapolate_fitted(double lambda_h, double lambda_h2, double lambda_h4) {
  const double d1 = lambda_h - lambda_h2;
  const double d2 = lambda_h2 - lambda_h4;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (d1 == 0.0 && d2 == 0.0) return Extrapolation{lambda_h4, nan, ExtrapolationStatus::kOk};
  if (d1 * d2 <= 0.0 || std::abs(d1) <= std::abs(d2))
    return Extrapolation{lambda_h4, nan, ExtrapolationStatus::kNonMonotone};
  const double ratio = d1 / d2;
  return Extrapolation{lambda_h4 - d2 / (ratio - 1.0), std::log2(ratio), ExtrapolationStatus::kOk};
}

}  // namespace spectralgap::discretize
