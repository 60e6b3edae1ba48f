#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "spectralgap/discretize.hpp"
#include "spectralgap/error.hpp"
#include "support.hpp"

using namespace spectralgap;
using discretize::Grid2D;
using geometry::Domain;

namespace {

constexpr double kPi = std::numbers::pi;

long lattice_count_in_disc(double h) {
  const long m = static_cast<long>(std::ceil(1.0 / h)) + 1;
  long count = 0;
  for (long i = -m; i <= m; ++i)
    for (long j = -m; j <= m; ++j)
      if ((i * h) * (i * h) + (j * h) * (j * h) < 1.0) ++count;
  return count;
}

discretize::GridOptions loose() {
  discretize::GridOptions o;
  o.min_active_nodes = 1;
  return o;
}

}  // namespace

TEST_CASE("build_grid node counts against lattice enumeration") {
  const auto coarse = discretize::build_grid(Domain::ball(2), 0.5, loose());
  CHECK(coarse.size() >= 5);
  CHECK(coarse.size() <= 13);
  CHECK(coarse.size() == lattice_count_in_disc(0.5));
  const auto fine = discretize::build_grid(Domain::ball(2), 0.01);
  CHECK(fine.size() == lattice_count_in_disc(0.01));
  CHECK(std::abs(fine.size() - kPi / 1e-4) <= 0.02 * kPi / 1e-4);
}

TEST_CASE("build_grid errors") {
  CHECK_THROWS_AS(discretize::build_grid(Domain::ball({0.5, 0.5}, 0.1), 1.0, loose()), InvalidArgument);
  CHECK_THROWS_AS(discretize::build_grid(Domain::ball(2), 0.5), InvalidArgument);  // below 100 nodes
  CHECK_THROWS_AS(discretize::build_grid(Domain::ball(3), 0.1), InvalidArgument);
  CHECK_THROWS_AS(discretize::build_grid(Domain::ball(2), 0.0), InvalidArgument);
  CHECK_THROWS_AS(discretize::build_grid(Domain::ball(2), -0.1), InvalidArgument);
}

TEST_CASE("grid invariants: membership, lexicographic order, bbox margin") {
  const auto d = Domain::dumbbell(2, 0.2);
  const double h = 1.0 / 32;
  const auto grid = discretize::build_grid(d, h);
  for (int row = 0; row < grid.size(); ++row) {
    const auto x = grid.coordinate(row);
    REQUIRE(geometry::contains(d, x, geometry::Junction::kIncluded));
    const auto& p = grid.active()[row];
    REQUIRE(grid.index_of(p.i, p.j) == row);
    if (row > 0) {
      const auto& q = grid.active()[row - 1];
      REQUIRE((q.i < p.i || (q.i == p.i && q.j < p.j)));
    }
  }
  const auto bb = geometry::bounding_box(d);
  for (int k = 0; k < 2; ++k) {
    CHECK(grid.bbox().lower[k] <= bb.lower[k] - 2.0 * h + 1e-12);
    CHECK(grid.bbox().upper[k] >= bb.upper[k] + 2.0 * h - 1e-12);
  }
  CHECK(grid.index_of(10000, 0) == -1);
  // With the junction excluded the x1 = 0 line carries no node.
  discretize::GridOptions strict;
  strict.junction = geometry::Junction::kExcluded;
  const auto split = discretize::build_grid(d, h, strict);
  for (const auto& p : split.active()) REQUIRE(p.i != 0);
  CHECK(split.size() < grid.size());
}

TEST_CASE("assemble small operators") {
  const double h = 0.25;
  auto one = discretize::assemble(Grid2D::from_nodes(h, {{0, 0}}));
  CHECK(one.n == 1);
  CHECK(Eigen::MatrixXd(one.matrix)(0, 0) == doctest::Approx(4.0 / (h * h)));
  auto two = discretize::assemble(Grid2D::from_nodes(h, {{0, 0}, {1, 0}}));
  const Eigen::MatrixXd m(two.matrix);
  CHECK(m(0, 0) == doctest::Approx(64.0));
  CHECK(m(1, 1) == doctest::Approx(64.0));
  CHECK(m(0, 1) == doctest::Approx(-16.0));
  CHECK(m(1, 0) == doctest::Approx(-16.0));
  // Diagonal neighbours do not couple.
  auto diag = discretize::assemble(Grid2D::from_nodes(h, {{0, 0}, {1, 1}}));
  CHECK(Eigen::MatrixXd(diag.matrix)(0, 1) == 0.0);
}

TEST_CASE("operator invariants on a dumbbell: symmetry sample, stencil values, positive definite") {
  const double h = 1.0 / 16;
  const auto op = discretize::assemble(discretize::build_grid(Domain::dumbbell(2, 0.3), h));
  const Eigen::MatrixXd dense(op.matrix);
  std::mt19937_64 rng(support::kSeed);
  std::uniform_int_distribution<int> idx(0, op.n - 1);
  for (int s = 0; s < 1000; ++s) {
    const int r = idx(rng), c = idx(rng);
    REQUIRE(dense(r, c) == dense(c, r));
  }
  for (int r = 0; r < op.n; ++r) {
    REQUIRE(dense(r, r) == doctest::Approx(4.0 / (h * h)));
    int neighbours = 0;
    for (Eigen::Index c = 0; c < op.n; ++c)
      if (c != r && dense(r, c) != 0.0) {
        REQUIRE(dense(r, c) == doctest::Approx(-1.0 / (h * h)));
        ++neighbours;
      }
    REQUIRE(neighbours <= 4);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("discrete square spectrum matches the closed form") {
  const int m = 12;
  const double h = 1.0 / (m + 1);
  const auto grid = discretize::build_grid(Domain::box({0.0, 0.0}, {1.0, 1.0}), h, loose());
  REQUIRE(grid.size() == m * m);
  const Eigen::MatrixXd dense(discretize::assemble(grid).matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  std::vector<double> expected;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      expected.push_back(4.0 / (h * h) *
                         (std::pow(std::sin(i * kPi * h / 2), 2) + std::pow(std::sin(j * kPi * h / 2), 2)));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < m * m; ++k) REQUIRE(es.eigenvalues()[k] == doctest::Approx(expected[k]).epsilon(1e-10));
}

TEST_CASE("two balls: block diagonal with mirror-identical blocks") {
  const auto grid = discretize::build_grid(Domain::two_balls(2), 1.0 / 16);
  const auto op = discretize::assemble(grid);
  int left = 0;
  for (int r = 0; r < op.n; ++r) {
    const auto& p = grid.active()[r];
    left += p.i < 0 ? 1 : 0;
    const int mirror = grid.index_of(-p.i, p.j);
    REQUIRE(mirror >= 0);
    for (discretize::SparseMatrix::InnerIterator it(op.matrix, r); it; ++it) {
      const auto& q = grid.active()[it.col()];
      REQUIRE((p.i < 0) == (q.i < 0));
      const int qm = grid.index_of(-q.i, q.j);
      REQUIRE(op.matrix.coeff(mirror, qm) == it.value());
    }
  }
  CHECK(2 * left == op.n);
}

TEST_CASE("coordinate dump") {
  const auto op = discretize::assemble(Grid2D::from_nodes(0.5, {{0, 0}, {0, 1}}));
  std::ostringstream out;
  discretize::write_coordinate(out, op);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("%%MatrixMarket", 0) == 0);
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == 2);
  CHECK(nnz == 4);
  std::set<std::pair<int, int>> seen;
  for (int k = 0; k < nnz; ++k) {
    int r, c;
    double v;
    in >> r >> c >> v;
    seen.insert({r, c});
    CHECK(v == (r == c ? 16.0 : -4.0));
  }
  CHECK(seen.size() == 4);
  CHECK(seen.count({1, 2}) == 1);
}

TEST_CASE("interpolation and prolongation reproduce bilinear data") {
  const auto coarse = discretize::build_grid(Domain::box({-1.0, -1.0}, {1.0, 1.0}), 0.125);
  Eigen::VectorXd v(coarse.size());
  const auto f = [](double x, double y) { return 1.0 + 2.0 * x - 3.0 * y + 0.5 * x * y; };
  for (int r = 0; r < coarse.size(); ++r) {
    const auto x = coarse.coordinate(r);
    v[r] = f(x[0], x[1]);
  }
  const auto s = discretize::interpolate(coarse, v, 0.3, -0.41);
  CHECK(s.value == doctest::Approx(f(0.3, -0.41)).epsilon(1e-13));
  CHECK(s.gradient[0] == doctest::Approx(2.0 + 0.5 * -0.41).epsilon(1e-12));
  CHECK(s.gradient[1] == doctest::Approx(-3.0 + 0.5 * 0.3).epsilon(1e-12));
  const auto fine = discretize::build_grid(Domain::box({-0.5, -0.5}, {0.5, 0.5}), 0.0625);
  const auto p = discretize::prolongate(coarse, v, fine);
  for (int r = 0; r < fine.size(); ++r) {
    const auto x = fine.coordinate(r);
    REQUIRE(p[r] == doctest::Approx(f(x[0], x[1])).epsilon(1e-12));
  }
  CHECK(discretize::interpolate(coarse, v, 5.0, 5.0).value == 0.0);
}

TEST_CASE("Richardson extrapolation") {
  auto e = discretize::extrapolate(3.0, 3.0, 2.0);
  CHECK(e.value == 3.0);
  const auto lam = [](double h) { return 7.25 + 0.8 * h * h; };
  e = discretize::extrapolate(lam(0.1), lam(0.05), 2.0);
  CHECK(e.value == doctest::Approx(7.25).epsilon(1e-12));
  e = discretize::extrapolate_fitted(lam(0.1), lam(0.05), lam(0.025));
  CHECK(e.value == doctest::Approx(7.25).epsilon(1e-12));
  CHECK(e.order == doctest::Approx(2.0).epsilon(1e-9));
  const auto lam1 = [](double h) { return 5.0 - 3.0 * std::pow(h, 1.3); };
  e = discretize::extrapolate_fitted(lam1(0.1), lam1(0.05), lam1(0.025));
  CHECK(e.value == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(e.order == doctest::Approx(1.3).epsilon(1e-9));
  e = discretize::extrapolate_fitted(1.0, 2.0, 1.5);
  CHECK(e.status == discretize::ExtrapolationStatus::kNonMonotone);
  CHECK(e.value == 1.5);
  e = discretize::extrapolate_fitted(1.0, 1.1, 1.3);  // diverging
  CHECK(e.status == discretize::ExtrapolationStatus::kNonMonotone);
  CHECK_THROWS_AS(discretize::extrapolate(1.0, 2.0, 0.0), InvalidArgument);
}
