#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "modalx/frame.hpp"
#include "modalx/perm_group.hpp"

namespace modalx {

struct SymmetryOptions {
  /// Groups whose order is at most this are fully enumerated.
  std::size_t enumeration_bound = kDefaultEnumerationBound;
};

/// Full automorphism group Aut<W, R>.
PermGroup automorphism_group(const Frame& frame, const SymmetryOptions& options = {});

/// G = Stab(w0) inside Aut<W, R>. Every element maps the accessible cluster
/// of w0 onto itself; this is asserted before returning.
PermGroup stabilizer(const Frame& frame, const SymmetryOptions& options = {});

inline constexpr std::size_t kNoBlock = std::numeric_limits<std::size_t>::max();

struct OrbitPartition {
  /// Blocks in ascending order of their smallest world; each block ascending.
  std::vector<WorldSet> blocks;
  /// block_of[w] is the block containing w, or kNoBlock if w is not covered.
  std::vector<std::size_t> block_of;

  std::size_t size() const noexcept { return blocks.size(); }
};

/// Orbits of `group` on the invariant set `on`. Throws if some generator maps
/// a point of `on` outside `on`.
OrbitPartition orbit_partition(const PermGroup& group, const WorldSet& on);

/// The accessible cluster of w0 with w0 itself removed.
WorldSet cluster_without_designated(const Frame& frame);

/// orbit_partition(stabilizer, cluster minus {w0}).
OrbitPartition cluster_orbits(const Frame& frame, const PermGroup& stabilizer_group);

/// Image of the restriction map G -> Sym(orbit), re-indexed so the i-th
/// smallest world of `orbit` becomes point i.
PermGroup restrict_to(const PermGroup& group, const WorldSet& orbit,
                      const SymmetryOptions& options = {});

struct ExtReport {
  std::size_t orbit = 0;
  std::size_t orbit_size = 0;
  GroupOrder restricted_order = 1;
  bool holds = false;
  std::string reason;
};

/// Finite (Ext): holds iff |G restricted to the orbit| = |orbit|!.
ExtReport check_ext(const PermGroup& group, const WorldSet& orbit, std::size_t orbit_index = 0,
                    const SymmetryOptions& options = {});

/// True iff G is transitive on cluster minus {designated} (exactly one orbit).
bool is_point_homogeneous(const PermGroup& group, const WorldSet& cluster,
                          WorldIndex designated);

GroupOrder factorial(std::size_t n);

}  // namespace modalx
