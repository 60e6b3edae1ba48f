#pragma once

// Symbolic planar (and low-dimensional) domains: balls, the pair of equal
// balls, the pushed-together dumbbell and its right half, boxes, ellipsoids,
// dilations and disjoint unions. Membership is strict (open sets).

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace spectralgap::geometry {

/// Volume of the unit ball in R^n (n >= 1). omega(1) = 2, omega(2) = pi.
double unit_ball_volume(int n);

/// Surface area of the unit sphere S^{n-1} in R^n (n >= 1). area(1) = 2.
double unit_sphere_area(int n);

class Domain;

struct Ball {
  std::vector<double> center;
  double radius = 1.0;
};

/// Two disjoint balls of equal `radius`, centres at +-separation/2 on the x1 axis.
struct TwoBalls {
  double radius = 1.0;
  double separation = 4.0;
};

/// Union of the two unit balls centred at (+-(1 - eps), 0), each cut by
/// the hyperplane {x1 = 0}.
struct Dumbbell {
  double epsilon = 0.1;
};

/// Right half of the dumbbell: the unit ball centred at (1 - eps, 0)
/// intersected with {x1 > 0}.
struct HalfDumbbell {
  double epsilon = 0.1;
};

/// Open axis-aligned box (lower, upper).
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct Ellipsoid {
  std::vector<double> center;
  std::vector<double> semi_axes;
};

/// Dilation t * inner about the origin.
struct Scaled {
  double factor = 1.0;
  std::shared_ptr<const Domain> inner;
};

struct DisjointUnion {
  std::vector<Domain> parts;
};

using Shape = std::variant<Ball, TwoBalls, Dumbbell, HalfDumbbell, Box, Ellipsoid, Scaled,
                           DisjointUnion>;

/// How the dumbbell treats the junction disk {x1 = 0, |x'| < sqrt(2 eps - eps^2)}.
/// kExcluded follows the strict two-piece definition; kIncluded uses the
/// interior of the closure, which is connected.
enum class Junction { kExcluded, kIncluded };

/// A validated domain in R^N. Construction checks every invariant.
class Domain {
public:
  Domain(Shape shape, int dimension);

  int dimension() const { return dimension_; }
  const Shape& shape() const { return shape_; }

  static Domain ball(int dimension, double radius = 1.0);
  static Domain ball(std::vector<double> center, double radius);
  /// Two unit-radius balls with centres at +-(radius + 1).
  static Domain two_balls(int dimension, double radius = 1.0);
  static Domain dumbbell(int dimension, double epsilon);
  static Domain half_dumbbell(int dimension, double epsilon);
  static Domain box(std::vector<double> lower, std::vector<double> upper);
  static Domain ellipsoid(std::vector<double> center, std::vector<double> semi_axes);
  static Domain scaled(double factor, Domain inner);
  static Domain disjoint_union(std::vector<Domain> parts);

private:
  Shape shape_;
  int dimension_;
};

struct BoundingBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct BoundingBall {
  std::vector<double> center;
  double radius = 0.0;
};

bool contains(const Domain& domain, std::span<const double> x,
              Junction junction = Junction::kExcluded);

double measure(const Domain& domain);

BoundingBox bounding_box(const Domain& domain);
BoundingBall bounding_ball(const Domain& domain);

/// Volume of the cap of the unit ball of depth eps, i.e. the part of the ball
/// lying beyond a hyperplane at distance 1 - eps from the centre.
double cap_volume(double epsilon, int dimension);

struct Rescaled {
  Domain domain;
  double factor;
};

/// Dilates `domain` so its measure equals the unit-ball volume omega_N.
Rescaled rescale_to_unit_measure(const Domain& domain);

/// Right circular cone over the junction disk with apex on the x1 axis:
/// {x1 > 0, sqrt(2 eps - eps^2) - x1 - |x'| > 0}.
class ConeRegion {
public:
  explicit ConeRegion(double epsilon);

  double epsilon() const { return epsilon_; }
  double apex_offset() const { return apex_offset_; }
  /// sqrt(2 eps - eps^2) - x1 - |x'|; positive inside (for x1 > 0).
  double height_function(std::span<const double> x) const;
  bool contains(std::span<const double> x) const;

private:
  double epsilon_;
  double apex_offset_;
};

/// omega_{N-1}/N (2 eps - eps^2)^{N/2}.
double cone_volume(double epsilon, int dimension);

nlohmann::json to_json(const Domain& domain);
Domain domain_from_json(const nlohmann::json& doc);

std::string kind_name(const Domain& domain);

}  // namespace spectralgap::geometry
