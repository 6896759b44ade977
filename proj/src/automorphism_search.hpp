#pragma once

#include <cstdint>
#include <vector>

#include "modalx/permutation.hpp"

namespace modalx::detail {

struct ChainSearchResult {
  std::vector<WorldIndex> base;           // only levels with nontrivial basic orbits
  std::vector<std::size_t> orbit_sizes;
  std::vector<Permutation> generators;    // strong generating set relative to base
  std::vector<std::size_t> generator_level;  // index into base for each generator
};

/// Stabilizer chain of the pointwise stabilizer of base_order[0..fixed_count)
/// inside Aut(relation), along the given base order.
///
/// Levels are processed deepest first so that each basic orbit can be pruned
/// with the generators already found below it; a candidate image is searched
/// only if it is not yet in the orbit. Each search individualizes the fixed
/// prefix on both sides, refines colours to a canonical equitable partition
/// and backtracks over same-coloured candidates, pruning on the first
/// relation violation.
ChainSearchResult search_stabilizer_chain(std::size_t degree,
                                          const std::vector<std::uint8_t>& relation,
                                          const std::vector<WorldIndex>& base_order,
                                          std::size_t fixed_count);

}  // namespace modalx::detail
