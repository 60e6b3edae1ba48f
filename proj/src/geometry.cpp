#include "spectralgap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectralgap/error.hpp"
#include "spectralgap/quadrature.hpp"

namespace spectralgap::geometry {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double transverse_norm_sq(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

void validate(const Shape& shape, int n) {
  require(n >= 2, "domain dimension must be >= 2");
  std::visit(
      Overloaded{
          [&](const Ball& b) {
            require(static_cast<int>(b.center.size()) == n, "ball centre has wrong dimension");
            require(b.radius > 0.0, "ball radius must be positive");
          },
          [&](const TwoBalls& t) {
            require(t.radius > 0.0, "two_balls radius must be positive");
            require(t.separation > 2.0 * t.radius, "two_balls separation must exceed 2 * radius");
          },
          [&](const Dumbbell& d) {
            require(d.epsilon > 0.0 && d.epsilon < 1.0, "dumbbell requires 0 < epsilon < 1");
          },
          [&](const HalfDumbbell& d) {
            require(d.epsilon > 0.0 && d.epsilon < 1.0, "half_dumbbell requires 0 < epsilon < 1");
          },
          [&](const Box& b) {
            require(static_cast<int>(b.lower.size()) == n && static_cast<int>(b.upper.size()) == n,
                    "box corners have wrong dimension");
            for (int i = 0; i < n; ++i) require(b.lower[i] < b.upper[i], "box must have lower < upper");
          },
          [&](const Ellipsoid& e) {
            require(static_cast<int>(e.center.size()) == n && static_cast<int>(e.semi_axes.size()) == n,
                    "ellipsoid data has wrong dimension");
            for (double a : e.semi_axes) require(a > 0.0, "ellipsoid semi-axes must be positive");
          },
          [&](const Scaled& s) {
            require(s.factor > 0.0 && std::isfinite(s.factor), "scale factor must be positive");
            require(s.inner != nullptr, "scaled domain needs an inner domain");
            require(s.inner->dimension() == n, "scaled inner domain has wrong dimension");
          },
          [&](const DisjointUnion& u) {
            require(!u.parts.empty(), "disjoint union needs at least one part");
            std::vector<BoundingBall> balls;
            for (const auto& p : u.parts) {
              require(p.dimension() == n, "union part has wrong dimension");
              balls.push_back(bounding_ball(p));
            }
            for (std::size_t i = 0; i < balls.size(); ++i)
              for (std::size_t j = i + 1; j < balls.size(); ++j)
                require(std::sqrt(squared_distance(balls[i].center, balls[j].center)) >
                            balls[i].radius + balls[j].radius,
                        "union parts must have disjoint bounding balls");
          },
      },
      shape);
}

std::vector<double> origin(int n) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); }

}  // namespace

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

Domain::Domain(Shape shape, int dimension) : shape_(std::move(shape)), dimension_(dimension) {
  validate(shape_, dimension_);
}

Domain Domain::ball(int dimension, double radius) { return Domain(Ball{origin(dimension), radius}, dimension); }

Domain Domain::ball(std::vector<double> center, double radius) {
  const int n = static_cast<int>(center.size());
  return Domain(Ball{std::move(center), radius}, n);
}

Domain Domain::two_balls(int dimension, double radius) {
  return Domain(TwoBalls{radius, 2.0 * (radius + 1.0)}, dimension);
}

Domain Domain::dumbbell(int dimension, double epsilon) { return Domain(Dumbbell{epsilon}, dimension); }

Domain Domain::half_dumbbell(int dimension, double epsilon) {
  return Domain(HalfDumbbell{epsilon}, dimension);
}

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
  const int n = static_cast<int>(lower.size());
  return Domain(Box{std::move(lower), std::move(upper)}, n);
}

Domain Domain::ellipsoid(std::vector<double> center, std::vector<double> semi_axes) {
  const int n = static_cast<int>(center.size());
  return Domain(Ellipsoid{std::move(center), std::move(semi_axes)}, n);
}

Domain Domain::scaled(double factor, Domain inner) {
  const int n = inner.dimension();
  return Domain(Scaled{factor, std::make_shared<const Domain>(std::move(inner))}, n);
}

Domain Domain::disjoint_union(std::vector<Domain> parts) {
  require(!parts.empty(), "disjoint union needs at least one part");
  const int n = parts.front().dimension();
  return Domain(DisjointUnion{std::move(parts)}, n);
}

bool contains(const Domain& domain, std::span<const double> x, Junction junction) {
  const int n = domain.dimension();
  if (static_cast<int>(x.size()) != n) throw InvalidArgument("point dimension does not match domain");
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return squared_distance(x, b.center) < b.radius * b.radius; },
          [&](const TwoBalls& t) {
            const double c = 0.5 * t.separation;
            const double rest = transverse_norm_sq(x);
            const double r2 = t.radius * t.radius;
            return (x[0] - c) * (x[0] - c) + rest < r2 || (x[0] + c) * (x[0] + c) + rest < r2;
          },
          [&](const Dumbbell& d) {
            if (x[0] == 0.0 && junction == Junction::kExcluded) return false;
            const double s = std::abs(x[0]) - 1.0 + d.epsilon;
            return s * s + transverse_norm_sq(x) < 1.0;
          },
          [&](const HalfDumbbell& d) {
            if (!(x[0] > 0.0)) return false;
            const double s = x[0] - 1.0 + d.epsilon;
            return s * s + transverse_norm_sq(x) < 1.0;
          },
          [&](const Box& b) {
            for (int i = 0; i < n; ++i)
              if (!(x[i] > b.lower[i] && x[i] < b.upper[i])) return false;
            return true;
          },
          [&](const Ellipsoid& e) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
              const double q = (x[i] - e.center[i]) / e.semi_axes[i];
              s += q * q;
            }
            return s < 1.0;
          },
          [&](const Scaled& s) {
            std::vector<double> y(x.begin(), x.end());
            for (double& v : y) v /= s.factor;
            return contains(*s.inner, y, junction);
          },
          [&](const DisjointUnion& u) {
            return std::any_of(u.parts.begin(), u.parts.end(),
                               [&](const Domain& p) { return contains(p, x, junction); });
          },
      },
      domain.shape());
}

double cap_volume(double epsilon, int dimension) {
  if (epsilon <= 0.0) return 0.0;
  const double section = unit_ball_volume(dimension - 1);
  const double exponent = 0.5 * (dimension - 1);
  // t = s^2 removes the t^{(N-1)/2} endpoint behaviour.
  auto integrand = [&](double s) {
    const double t = s * s;
    return section * std::pow(std::max(0.0, 2.0 * t - t * t), exponent) * 2.0 * s;
  };
  quad::Config config;
  config.rel_tol = 1e-12;
  config.abs_tol = 0.0;
  const auto r = quad::integrate_scalar(integrand, 0.0, std::sqrt(epsilon), config);
  if (!r.converged) throw ConvergenceFailure("cap volume quadrature did not converge");
  return r.value[0];
}

double measure(const Domain& domain) {
  const int n = domain.dimension();
  const double omega = unit_ball_volume(n);
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return omega * std::pow(b.radius, n); },
          [&](const TwoBalls& t) { return 2.0 * omega * std::pow(t.radius, n); },
          [&](const Dumbbell& d) { return 2.0 * (omega - cap_volume(d.epsilon, n)); },
          [&](const HalfDumbbell& d) { return omega - cap_volume(d.epsilon, n); },
          [&](const Box& b) {
            double v = 1.0;
            for (int i = 0; i < n; ++i) v *= b.upper[i] - b.lower[i];
            return v;
          },
          [&](const Ellipsoid& e) {
            double v = omega;
            for (double a : e.semi_axes) v *= a;
            return v;
          },
          [&](const Scaled& s) { return std::pow(s.factor, n) * measure(*s.inner); },
          [&](const DisjointUnion& u) {
            double v = 0.0;
            for (const auto& p : u.parts) v += measure(p);
            return v;
          },
      },
      domain.shape());
}

BoundingBox bounding_box(const Domain& domain) {
  const int n = domain.dimension();
  auto symmetric = [n](double r) {
    return BoundingBox{std::vector<double>(static_cast<std::size_t>(n), -r),
                       std::vector<double>(static_cast<std::size_t>(n), r)};
  };
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            BoundingBox box{b.center, b.center};
            for (int i = 0; i < n; ++i) {
              box.lower[i] -= b.radius;
              box.upper[i] += b.radius;
            }
            return box;
          },
          [&](const TwoBalls& t) {
            auto box = symmetric(t.radius);
            box.lower[0] = -0.5 * t.separation - t.radius;
            box.upper[0] = 0.5 * t.separation + t.radius;
            return box;
          },
          [&](const Dumbbell& d) {
            auto box = symmetric(1.0);
            box.lower[0] = -(2.0 - d.epsilon);
            box.upper[0] = 2.0 - d.epsilon;
            return box;
          },
          [&](const HalfDumbbell& d) {
            auto box = symmetric(1.0);
            box.lower[0] = 0.0;
            box.upper[0] = 2.0 - d.epsilon;
            return box;
          },
          [&](const Box& b) { return BoundingBox{b.lower, b.upper}; },
          [&](const Ellipsoid& e) {
            BoundingBox box{e.center, e.center};
            for (int i = 0; i < n; ++i) {
              box.lower[i] -= e.semi_axes[i];
              box.upper[i] += e.semi_axes[i];
            }
            return box;
          },
          [&](const Scaled& s) {
            auto box = bounding_box(*s.inner);
            for (int i = 0; i < n; ++i) {
              box.lower[i] *= s.factor;
              box.upper[i] *= s.factor;
            }
            return box;
          },
          [&](const DisjointUnion& u) {
            auto box = bounding_box(u.parts.front());
            for (const auto& p : u.parts) {
              const auto b = bounding_box(p);
              for (int i = 0; i < n; ++i) {
                box.lower[i] = std::min(box.lower[i], b.lower[i]);
                box.upper[i] = std::max(box.upper[i], b.upper[i]);
              }
            }
            return box;
          },
      },
      domain.shape());
}

BoundingBall bounding_ball(const Domain& domain) {
  const int n = domain.dimension();
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return BoundingBall{b.center, b.radius}; },
          [&](const TwoBalls& t) { return BoundingBall{origin(n), 0.5 * t.separation + t.radius}; },
          [&](const Dumbbell& d) { return BoundingBall{origin(n), 2.0 - d.epsilon}; },
          [&](const HalfDumbbell& d) {
            auto c = origin(n);
            c[0] = 1.0 - d.epsilon;
            return BoundingBall{c, 1.0};
          },
          [&](const Box& b) {
            std::vector<double> c(static_cast<std::size_t>(n));
            double r2 = 0.0;
            for (int i = 0; i < n; ++i) {
              c[i] = 0.5 * (b.lower[i] + b.upper[i]);
              r2 += 0.25 * (b.upper[i] - b.lower[i]) * (b.upper[i] - b.lower[i]);
            }
            return BoundingBall{c, std::sqrt(r2)};
          },
          [&](const Ellipsoid& e) {
            return BoundingBall{e.center, *std::max_element(e.semi_axes.begin(), e.semi_axes.end())};
          },
          [&](const Scaled& s) {
            auto b = bounding_ball(*s.inner);
            for (double& c : b.center) c *= s.factor;
            b.radius *= s.factor;
            return b;
          },
          [&](const DisjointUnion& u) {
            const auto box = bounding_box(domain);
            std::vector<double> c(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) c[i] = 0.5 * (box.lower[i] + box.upper[i]);
            double r = 0.0;
            for (const auto& p : u.parts) {
              const auto b = bounding_ball(p);
              r = std::max(r, std::sqrt(squared_distance(b.center, c)) + b.radius);
            }
            return BoundingBall{c, r};
          },
      },
      domain.shape());
}

Rescaled rescale_to_unit_measure(const Domain& domain) {
  const double m = measure(domain);
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("cannot rescale a domain of zero measure");
  const int n = domain.dimension();
  const double t = std::pow(unit_ball_volume(n) / m, 1.0 / n);
  return Rescaled{Domain::scaled(t, domain), t};
}

ConeRegion::ConeRegion(double epsilon) : epsilon_(epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, "cone requires 0 < epsilon < 1");
  apex_offset_ = std::sqrt(2.0 * epsilon - epsilon * epsilon);
}

double ConeRegion::height_function(std::span<const double> x) const {
  return apex_offset_ - x[0] - std::sqrt(transverse_norm_sq(x));
}

bool ConeRegion::contains(std::span<const double> x) const {
  return x[0] > 0.0 && height_function(x) > 0.0;
}

double cone_volume(double epsilon, int dimension) {
  if (epsilon <= 0.0) return 0.0;
  return unit_ball_volume(dimension - 1) / dimension *
         std::pow(2.0 * epsilon - epsilon * epsilon, 0.5 * dimension);
}

std::string kind_name(const Domain& domain) {
  return std::visit(Overloaded{
                        [](const Ball&) { return std::string("ball"); },
                        [](const TwoBalls&) { return std::string("two_balls"); },
                        [](const Dumbbell&) { return std::string("dumbbell"); },
                        [](const HalfDumbbell&) { return std::string("half_dumbbell"); },
                        [](const Box&) { return std::string("box"); },
                        [](const Ellipsoid&) { return std::string("ellipsoid"); },
                        [](const Scaled&) { return std::string("scaled"); },
                        [](const DisjointUnion&) { return std::string("disjoint_union"); },
                    },
                    domain.shape());
}

nlohmann::json to_json(const Domain& domain) {
  nlohmann::json params = std::visit(
      Overloaded{
          [](const Ball& b) { return nlohmann::json{{"center", b.center}, {"radius", b.radius}}; },
          [](const TwoBalls& t) {
            return nlohmann::json{{"radius", t.radius}, {"separation", t.separation}};
          },
          [](const Dumbbell& d) { return nlohmann::json{{"epsilon", d.epsilon}}; },
          [](const HalfDumbbell& d) { return nlohmann::json{{"epsilon", d.epsilon}}; },
          [](const Box& b) { return nlohmann::json{{"lower", b.lower}, {"upper", b.upper}}; },
          [](const Ellipsoid& e) {
            return nlohmann::json{{"center", e.center}, {"semi_axes", e.semi_axes}};
          },
          [](const Scaled& s) { return nlohmann::json{{"factor", s.factor}, {"inner", to_json(*s.inner)}}; },
          [](const DisjointUnion& u) {
            nlohmann::json parts = nlohmann::json::array();
            for (const auto& p : u.parts) parts.push_back(to_json(p));
            return nlohmann::json{{"parts", parts}};
          },
      },
      domain.shape());
  return nlohmann::json{{"kind", kind_name(domain)}, {"N", domain.dimension()}, {"params", params}};
}

Domain domain_from_json(const nlohmann::json& doc) {
  try {
    require(doc.is_object(), "domain document must be a JSON object");
    const std::string kind = doc.at("kind").get<std::string>();
    const int n = doc.at("N").get<int>();
    const nlohmann::json params = doc.value("params", nlohmann::json::object());
    require(params.is_object(), "domain params must be an object");
    if (kind == "ball") {
      auto center = params.value("center", origin(n));
      return Domain(Ball{center, params.value("radius", 1.0)}, n);
    }
    if (kind == "two_balls") {
      const double r = params.value("radius", 1.0);
      return Domain(TwoBalls{r, params.value("separation", 2.0 * (r + 1.0))}, n);
    }
    if (kind == "dumbbell") return Domain(Dumbbell{params.at("epsilon").get<double>()}, n);
    if (kind == "half_dumbbell") return Domain(HalfDumbbell{params.at("epsilon").get<double>()}, n);
    if (kind == "box")
      return Domain(Box{params.at("lower").get<std::vector<double>>(),
                        params.at("upper").get<std::vector<double>>()},
                    n);
    if (kind == "ellipsoid")
      return Domain(Ellipsoid{params.value("center", origin(n)),
                              params.at("semi_axes").get<std::vector<double>>()},
                    n);
    if (kind == "scaled") {
      auto inner = domain_from_json(params.at("inner"));
      return Domain(Scaled{params.at("factor").get<double>(), std::make_shared<const Domain>(std::move(inner))},
                    n);
    }
    if (kind == "disjoint_union") {
      std::vector<Domain> parts;
      for (const auto& p : params.at("parts")) parts.push_back(domain_from_json(p));
      return Domain(DisjointUnion{std::move(parts)}, n);
    }
    throw InvalidArgument("unknown domain kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed domain document: ") + e.what());
  }
}

}  // namespace spectralgap::geometry
