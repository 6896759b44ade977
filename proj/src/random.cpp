#include "modalx/random.hpp"

#include <cmath>

namespace modalx {

std::uint64_t RandomStream::below(std::uint64_t n) noexcept {
  const std::uint64_t limit = -n % n;  // 2^64 mod n
  for (;;) {
    const auto x = next_u64();
    if (x >= limit) return x % n;
  }
}

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RandomStream::gamma(double shape) noexcept {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::beta(double a, double b) noexcept {
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  // Both gammas can underflow for tiny shapes; fall back to the limiting two-point law.
  if (s == 0.0) return uniform() < a / (a + b) ? 1.0 : 0.0;
  return x / s;
}

std::vector<double> RandomStream::dirichlet(const std::vector<double>& alpha) noexcept {
  std::vector<double> out(alpha.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) sum += out[i] = gamma(alpha[i]);
  if (sum == 0.0) {
    out.assign(alpha.size(), 0.0);
    out[categorical(cumulative(alpha))] = 1.0;
    return out;
  }
  for (auto& x : out) x /= sum;
  return out;
}

std::size_t RandomStream::categorical(const std::vector<double>& cum) noexcept {
  const double u = uniform() * cum.back();
  std::size_t i = 0;
  while (i + 1 < cum.size() && !(u < cum[i])) ++i;
  return i;
}

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cum[i] = acc += weights[i];
  return cum;
}

}  // namespace modalx
