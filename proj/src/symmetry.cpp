#include "modalx/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "automorphism_search.hpp"
#include "modalx/error.hpp"

namespace modalx {

namespace {

std::vector<WorldIndex> designated_first_order(const Frame& frame) {
  std::vector<WorldIndex> order{frame.designated()};
  for (WorldIndex w = 0; w < frame.size(); ++w)
    if (w != frame.designated()) order.push_back(w);
  return order;
}

PermGroup group_from_search(const Frame& frame, std::size_t fixed_count,
                            const SymmetryOptions& options) {
  const auto order = designated_first_order(frame);
  auto result = detail::search_stabilizer_chain(frame.size(), frame.relation(), order, fixed_count);
  auto group = PermGroup::from_chain(frame.size(), std::move(result.base),
                                     std::move(result.orbit_sizes), std::move(result.generators),
                                     options.enumeration_bound);
  auto source = std::make_shared<FrameSource>();
  source->degree = frame.size();
  source->relation = frame.relation();
  source->fixed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(fixed_count));
  group.set_source(std::move(source));
  return group;
}

void validate_subset(const WorldSet& set, std::size_t degree) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] >= degree) throw Error("world index out of range for group degree");
    if (i > 0 && set[i] <= set[i - 1]) throw Error("world set must be ascending and duplicate-free");
  }
}

void require_invariant(const PermGroup& group, const WorldSet& set) {
  std::vector<bool> member(group.degree(), false);
  for (auto w : set) member[w] = true;
  for (const auto& g : group.generators())
    for (auto w : set)
      if (!member[g(w)])
        throw Error("world set is not invariant: a generator maps world " + std::to_string(w) +
                    " to " + std::to_string(g(w)));
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PermGroup automorphism_group(const Frame& frame, const SymmetryOptions& options) {
  return group_from_search(frame, 0, options);
}

PermGroup stabilizer(const Frame& frame, const SymmetryOptions& options) {
  auto group = group_from_search(frame, 1, options);
  const auto cluster = accessible_cluster(frame, frame.designated());
  for (const auto& g : group.generators()) {
    if (g(frame.designated()) != frame.designated())
      throw Error("internal: stabilizer generator moves the designated world");
  }
  require_invariant(group, cluster);
  return group;
}

OrbitPartition orbit_partition(const PermGroup& group, const WorldSet& on) {
  validate_subset(on, group.degree());
  require_invariant(group, on);
  UnionFind uf(group.degree());
  for (const auto& g : group.generators())
    for (auto w : on) uf.unite(w, g(w));

  OrbitPartition out;
  out.block_of.assign(group.degree(), kNoBlock);
  std::vector<std::size_t> block_of_root(group.degree(), kNoBlock);
  for (auto w : on) {  // ascending, so blocks come out ordered by smallest world
    const auto root = uf.find(w);
    if (block_of_root[root] == kNoBlock) {
      block_of_root[root] = out.blocks.size();
      out.blocks.emplace_back();
    }
    out.blocks[block_of_root[root]].push_back(w);
    out.block_of[w] = block_of_root[root];
  }
  return out;
}

WorldSet cluster_without_designated(const Frame& frame) {
  auto cluster = accessible_cluster(frame, frame.designated());
  std::erase(cluster, frame.designated());
  return cluster;
}

OrbitPartition cluster_orbits(const Frame& frame, const PermGroup& stabilizer_group) {
  return orbit_partition(stabilizer_group, cluster_without_designated(frame));
}

PermGroup restrict_to(const PermGroup& group, const WorldSet& orbit, const SymmetryOptions& options) {
  validate_subset(orbit, group.degree());
  if (orbit.empty()) throw Error("cannot restrict to an empty set");
  require_invariant(group, orbit);

  std::vector<std::size_t> position(group.degree(), kNoBlock);
  for (std::size_t i = 0; i < orbit.size(); ++i) position[orbit[i]] = i;
  auto project = [&](const Permutation& g) {
    std::vector<WorldIndex> img(orbit.size());
    for (std::size_t i = 0; i < orbit.size(); ++i)
      img[i] = static_cast<WorldIndex>(position[g(orbit[i])]);
    return Permutation::from_image_unchecked(std::move(img));
  };

  if (const auto& src = group.source()) {
    // Search along a base that lists the orbit right after the fixed points:
    // the leading levels then form a stabilizer chain of the restricted image.
    std::vector<WorldIndex> order = src->fixed;
    std::vector<bool> placed(group.degree(), false);
    for (auto w : order) placed[w] = true;
    for (auto w : orbit) {
      if (placed[w]) throw Error("orbit contains a fixed point of the source group");
      order.push_back(w);
      placed[w] = true;
    }
    for (WorldIndex w = 0; w < group.degree(); ++w)
      if (!placed[w]) order.push_back(w);

    const auto chain =
        detail::search_stabilizer_chain(src->degree, src->relation, order, src->fixed.size());
    std::vector<WorldIndex> base;
    std::vector<std::size_t> sizes;
    std::size_t orbit_levels = 0;
    for (std::size_t i = 0; i < chain.base.size(); ++i) {
      if (position[chain.base[i]] == kNoBlock) break;
      base.push_back(static_cast<WorldIndex>(position[chain.base[i]]));
      sizes.push_back(chain.orbit_sizes[i]);
      ++orbit_levels;
    }
    std::vector<Permutation> gens;
    for (std::size_t g = 0; g < chain.generators.size(); ++g)
      if (chain.generator_level[g] < orbit_levels) gens.push_back(project(chain.generators[g]));
    return PermGroup::from_chain(orbit.size(), std::move(base), std::move(sizes), std::move(gens),
                                 options.enumeration_bound);
  }

  std::set<Permutation> unique;
  for (const auto& g : group.generators()) {
    auto p = project(g);
    if (!p.is_identity()) unique.insert(std::move(p));
  }
  return PermGroup::from_generators(orbit.size(), {unique.begin(), unique.end()},
                                    options.enumeration_bound);
}

GroupOrder factorial(std::size_t n) {
  GroupOrder f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

ExtReport check_ext(const PermGroup& group, const WorldSet& orbit, std::size_t orbit_index,
                    const SymmetryOptions& options) {
  ExtReport report;
  report.orbit = orbit_index;
  report.orbit_size = orbit.size();
  report.restricted_order = restrict_to(group, orbit, options).order();
  const auto full = factorial(orbit.size());
  report.holds = report.restricted_order == full;
  report.reason = "restricted order " + report.restricted_order.str() +
                  (report.holds ? " equals " : " is smaller than ") + std::to_string(orbit.size()) +
                  "! = " + full.str();
  return report;
}

bool is_point_homogeneous(const PermGroup& group, const WorldSet& cluster, WorldIndex designated) {
  WorldSet rest;
  for (auto w : cluster)
    if (w != designated) rest.push_back(w);
  return orbit_partition(group, rest).size() == 1;
}

}  // namespace modalx
