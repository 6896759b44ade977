#include "automorphism_search.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace modalx::detail {

namespace {

constexpr WorldIndex kUnassigned = static_cast<WorldIndex>(-1);

class Structure {
 public:
  Structure(std::size_t n, const std::vector<std::uint8_t>& rel) : n_(n), rel_(rel) {}

  std::size_t size() const { return n_; }
  bool r(std::size_t a, std::size_t b) const { return rel_[a * n_ + b] != 0; }
  unsigned edge_type(std::size_t v, std::size_t u) const {
    return (r(v, u) ? 2u : 0u) | (r(u, v) ? 1u : 0u);
  }

 private:
  std::size_t n_;
  const std::vector<std::uint8_t>& rel_;
};

std::size_t count_classes(const std::vector<std::uint32_t>& colors) {
  auto sorted = colors;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Colour refinement with canonical labels: new colours are ranks of the
// signature (colour, self-loop, sorted neighbour colour/edge-type multiset),
// so equivalent inputs produce equal labels.
std::vector<std::uint32_t> refine(const Structure& s, std::vector<std::uint32_t> colors) {
  const auto n = s.size();
  std::size_t classes = count_classes(colors);
  std::vector<std::vector<std::uint64_t>> sig(n);
  std::vector<std::size_t> order(n);
  while (true) {
    for (std::size_t v = 0; v < n; ++v) {
      auto& row = sig[v];
      row.clear();
      row.push_back(colors[v]);
      row.push_back(s.r(v, v) ? 1 : 0);
      const auto head = row.size();
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v) continue;
        const auto t = s.edge_type(v, u);
        if (t != 0) row.push_back(static_cast<std::uint64_t>(colors[u]) * 4 + t);
      }
      std::sort(row.begin() + static_cast<std::ptrdiff_t>(head), row.end());
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
    std::vector<std::uint32_t> next(n);
    std::uint32_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++rank;
      next[order[i]] = rank;
    }
    const std::size_t next_classes = n == 0 ? 0 : rank + 1;
    colors = std::move(next);
    if (next_classes == classes) return colors;
    classes = next_classes;
  }
}

std::vector<std::uint32_t> individualize(const Structure& s, const std::vector<std::uint32_t>& base,
                                         const std::vector<WorldIndex>& points) {
  auto colors = base;
  const auto offset = static_cast<std::uint32_t>(s.size());
  for (std::size_t j = 0; j < points.size(); ++j)
    colors[points[j]] = offset + static_cast<std::uint32_t>(j);
  return refine(s, std::move(colors));
}

class MapSearch {
 public:
  MapSearch(const Structure& s, std::vector<std::uint32_t> source_colors,
            std::vector<std::uint32_t> target_colors)
      : s_(s),
        src_(std::move(source_colors)),
        tgt_(std::move(target_colors)),
        map_(s.size(), kUnassigned),
        used_(s.size(), false) {}

  bool assign_fixed(WorldIndex from, WorldIndex to) {
    if (!consistent(from, to)) return false;
    bind(from, to);
    return true;
  }

  std::optional<Permutation> run() {
    const auto n = s_.size();
    std::vector<std::size_t> class_size(n + n + 1, 0);
    for (auto c : src_) ++class_size[c];
    for (std::size_t v = 0; v < n; ++v)
      if (map_[v] == kUnassigned) pending_.push_back(static_cast<WorldIndex>(v));
    std::sort(pending_.begin(), pending_.end(), [&](WorldIndex a, WorldIndex b) {
      if (class_size[src_[a]] != class_size[src_[b]])
        return class_size[src_[a]] < class_size[src_[b]];
      if (src_[a] != src_[b]) return src_[a] < src_[b];
      return a < b;
    });
    if (!extend(0)) return std::nullopt;
    return Permutation::from_image_unchecked(map_);
  }

 private:
  bool consistent(WorldIndex v, WorldIndex t) const {
    if (s_.r(v, v) != s_.r(t, t)) return false;
    for (auto u : assigned_) {
      const auto mu = map_[u];
      if (s_.r(v, u) != s_.r(t, mu) || s_.r(u, v) != s_.r(mu, t)) return false;
    }
    return true;
  }

  void bind(WorldIndex v, WorldIndex t) {
    map_[v] = t;
    used_[t] = true;
    assigned_.push_back(v);
  }

  void unbind(WorldIndex v) {
    used_[map_[v]] = false;
    map_[v] = kUnassigned;
    assigned_.pop_back();
  }

  bool extend(std::size_t depth) {
    if (depth == pending_.size()) return true;
    const auto v = pending_[depth];
    for (WorldIndex t = 0; t < s_.size(); ++t) {
      if (used_[t] || tgt_[t] != src_[v] || !consistent(v, t)) continue;
      bind(v, t);
      if (extend(depth + 1)) return true;
      unbind(v);
    }
    return false;
  }

  const Structure& s_;
  std::vector<std::uint32_t> src_;
  std::vector<std::uint32_t> tgt_;
  std::vector<WorldIndex> map_;
  std::vector<bool> used_;
  std::vector<WorldIndex> assigned_;
  std::vector<WorldIndex> pending_;
};

// An automorphism fixing `prefix` pointwise and sending x to c, if any.
std::optional<Permutation> find_mapping(const Structure& s, const std::vector<std::uint32_t>& base,
                                        std::vector<WorldIndex> prefix, WorldIndex x,
                                        WorldIndex c) {
  auto src_points = prefix;
  src_points.push_back(x);
  auto tgt_points = prefix;
  tgt_points.push_back(c);
  auto src = individualize(s, base, src_points);
  auto tgt = individualize(s, base, tgt_points);
  auto a = src, b = tgt;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return std::nullopt;

  MapSearch search(s, std::move(src), std::move(tgt));
  for (auto p : prefix)
    if (!search.assign_fixed(p, p)) return std::nullopt;
  if (!search.assign_fixed(x, c)) return std::nullopt;
  return search.run();
}

std::vector<bool> orbit_of(WorldIndex point, const std::vector<Permutation>& gens, std::size_t n) {
  std::vector<bool> in(n, false);
  std::vector<WorldIndex> stack{point};
  in[point] = true;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (const auto& g : gens) {
      const auto y = g(x);
      if (!in[y]) {
        in[y] = true;
        stack.push_back(y);
      }
    }
  }
  return in;
}

}  // namespace

ChainSearchResult search_stabilizer_chain(std::size_t degree,
                                          const std::vector<std::uint8_t>& relation,
                                          const std::vector<WorldIndex>& base_order,
                                          std::size_t fixed_count) {
  const Structure s(degree, relation);
  const auto base_colors = refine(s, std::vector<std::uint32_t>(degree, 0));

  std::vector<Permutation> gens;
  std::vector<std::size_t> gen_level;
  std::vector<std::size_t> sizes(degree, 1);

  for (std::size_t i = degree; i-- > fixed_count;) {
    const std::vector<WorldIndex> prefix(base_order.begin(),
                                         base_order.begin() + static_cast<std::ptrdiff_t>(i));
    const auto b = base_order[i];
    const auto level_colors = individualize(s, base_colors, prefix);
    auto in_orbit = orbit_of(b, gens, degree);
    for (WorldIndex c = 0; c < degree; ++c) {
      if (in_orbit[c] || level_colors[c] != level_colors[b]) continue;
      if (auto p = find_mapping(s, base_colors, prefix, b, c)) {
        gens.push_back(std::move(*p));
        gen_level.push_back(i);
        in_orbit = orbit_of(b, gens, degree);
      }
    }
    sizes[i] = static_cast<std::size_t>(std::count(in_orbit.begin(), in_orbit.end(), true));
  }

  ChainSearchResult out;
  std::vector<std::size_t> compressed(degree, 0);
  for (std::size_t i = fixed_count; i < degree; ++i) {
    if (sizes[i] <= 1) continue;
    compressed[i] = out.base.size();
    out.base.push_back(base_order[i]);
    out.orbit_sizes.push_back(sizes[i]);
  }
  // Generators were found deepest level first; emit shallow levels first.
  for (std::size_t g = gens.size(); g-- > 0;) {
    out.generators.push_back(gens[g]);
    out.generator_level.push_back(compressed[gen_level[g]]);
  }
  return out;
}

}  // namespace modalx::detail
