#pragma once

// Test-only reference computations. Everything here is deliberately naive and
// shares no code path with the library beyond the Frame accessors.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "modalx/frame.hpp"

namespace oracle {

using Image = std::vector<modalx::WorldIndex>;

inline bool preserves(const modalx::Frame& f, const Image& p) {
  const auto n = f.size();
  for (modalx::WorldIndex i = 0; i < n; ++i)
    for (modalx::WorldIndex j = 0; j < n; ++j)
      if (f.related(i, j) != f.related(p[i], p[j])) return false;
  return true;
}

/// Every bijection of W, filtered by relation preservation.
inline std::vector<Image> automorphisms(const modalx::Frame& f) {
  Image p(f.size());
  std::iota(p.begin(), p.end(), 0u);
  std::vector<Image> out;
  do {
    if (preserves(f, p)) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline std::vector<Image> stabilizer(const modalx::Frame& f) {
  std::vector<Image> out;
  for (auto& p : automorphisms(f))
    if (p[f.designated()] == f.designated()) out.push_back(p);
  return out;
}

/// Orbits by direct reachability under the full element list.
inline std::vector<std::vector<modalx::WorldIndex>> orbits(const std::vector<Image>& elements,
                                                           const std::vector<modalx::WorldIndex>& on) {
  std::vector<std::vector<modalx::WorldIndex>> out;
  std::set<modalx::WorldIndex> seen;
  for (auto w : on) {
    if (seen.count(w)) continue;
    std::set<modalx::WorldIndex> orbit;
    for (const auto& p : elements) orbit.insert(p[w]);
    seen.insert(orbit.begin(), orbit.end());
    out.emplace_back(orbit.begin(), orbit.end());
  }
  return out;
}

/// Number of distinct restrictions of the elements to `orbit`.
inline std::size_t restricted_order(const std::vector<Image>& elements,
                                    const std::vector<modalx::WorldIndex>& orbit) {
  std::set<Image> images;
  for (const auto& p : elements) {
    Image r;
    for (auto w : orbit) r.push_back(p[w]);
    images.insert(r);
  }
  return images.size();
}

/// Random relation; optionally closed to a preorder.
inline modalx::Frame random_frame(std::size_t n, double density, std::mt19937_64& rng,
                                  bool preorder) {
  std::bernoulli_distribution edge(density);
  std::vector<std::string> worlds;
  for (std::size_t i = 0; i < n; ++i) worlds.push_back("w" + std::to_string(i));
  std::vector<std::uint8_t> rel(n * n, 0);
  for (auto& c : rel) c = edge(rng) ? 1 : 0;
  if (preorder) {
    for (std::size_t i = 0; i < n; ++i) rel[i * n + i] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (rel[i * n + j] && rel[j * n + k] && !rel[i * n + k]) {
              rel[i * n + k] = 1;
              changed = true;
            }
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  return modalx::Frame("random", worlds, rel, static_cast<modalx::WorldIndex>(pick(rng)));
}

}  // namespace oracle
