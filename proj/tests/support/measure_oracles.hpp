#pragma once

// Naive reference computations over explicit valuation vectors.

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "oracles.hpp"

namespace oracle {

using Bits = std::vector<std::vector<int>>;  // [world][atom]

inline Bits decode(std::uint64_t index, std::size_t worlds, std::size_t k) {
  Bits v(worlds, std::vector<int>(k));
  std::size_t bit = 0;
  for (std::size_t w = 0; w < worlds; ++w)
    for (std::size_t l = 0; l < k; ++l, ++bit) v[w][l] = static_cast<int>((index >> bit) & 1u);
  return v;
}

inline std::uint64_t encode(const Bits& v) {
  std::uint64_t index = 0;
  std::size_t bit = 0;
  for (const auto& world : v)
    for (int b : world) index |= static_cast<std::uint64_t>(b) << bit++;
  return index;
}

/// (p . V)(w) = V(p^-1(w)), written as V'(p(w)) = V(w).
inline Bits relocate(const Image& p, const Bits& v) {
  Bits out(v.size());
  for (std::size_t w = 0; w < v.size(); ++w) out[p[w]] = v[w];
  return out;
}

/// Orbits of Omega under an explicit element list, each as an index set.
inline std::set<std::set<std::uint64_t>> valuation_orbits(const std::vector<Image>& elements,
                                                          std::size_t worlds, std::size_t k) {
  std::set<std::set<std::uint64_t>> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << (worlds * k)); ++i) {
    std::set<std::uint64_t> orbit;
    for (const auto& p : elements) orbit.insert(encode(relocate(p, decode(i, worlds, k))));
    out.insert(orbit);
  }
  return out;
}

/// Probability of one valuation under per-world Bernoulli product parameters.
inline double bernoulli_product(const Bits& v, const std::vector<std::vector<double>>& theta_at_world) {
  double p = 1.0;
  for (std::size_t w = 0; w < v.size(); ++w)
    for (std::size_t l = 0; l < v[w].size(); ++l)
      p *= v[w][l] ? theta_at_world[w][l] : 1.0 - theta_at_world[w][l];
  return p;
}

inline double binomial_term(double theta, std::size_t successes, std::size_t n) {
  return std::pow(theta, static_cast<double>(successes)) *
         std::pow(1.0 - theta, static_cast<double>(n - successes));
}

}  // namespace oracle
