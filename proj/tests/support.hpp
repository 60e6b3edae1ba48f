#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace support {

inline constexpr std::uint64_t kSeed = 987654321;

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Additive recurrence with the generalised golden ratio (R_d sequence).
class Kronecker {
public:
  explicit Kronecker(int dim) : alpha_(dim), x_(dim, 0.5) {
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    for (int i = 0; i < dim; ++i) alpha_[i] = std::fmod(std::pow(1.0 / phi, i + 1), 1.0);
  }
  const std::vector<double>& next() {
    for (std::size_t i = 0; i < x_.size(); ++i) x_[i] = std::fmod(x_[i] + alpha_[i], 1.0);
    return x_;
  }

private:
  std::vector<double> alpha_;
  std::vector<double> x_;
};

// Brent-free bisection on a sign change of f in [a, b].
template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace support
