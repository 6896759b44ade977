#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "modalx/dataset.hpp"
#include "modalx/hierarchical.hpp"
#include "modalx/measure.hpp"
#include "modalx/random.hpp"
#include "modalx/symmetry.hpp"

namespace modalx {

struct SampleOptions {
  /// 0 means MODALX_THREADS if set, else the hardware concurrency.
  std::size_t threads = 0;
};

/// Worker count after applying MODALX_THREADS.
std::size_t resolve_threads(std::size_t requested);

/// Latent layout a spec induces on a partition.
LatentLayout latent_layout(const HierarchicalSpec& spec, const OrbitPartition& partition);

/// One directing measure per block for replicate `replicate`. Independent
/// coupling gives each block its own stream; shared coupling copies a
/// single draw to every block.
std::vector<DirectingMeasure> draw_latents(const HierarchicalSpec& spec, const OrbitPartition& partition,
                                           std::uint64_t seed, std::uint64_t replicate);

/// Outcomes i.i.d. from the block's directing measure at every block world;
/// worlds outside all blocks draw from `designated`.
Valuation sample_valuation(const std::vector<DirectingMeasure>& latents, const OrbitPartition& partition,
                           const DirectingMeasure& designated, RandomStream& stream);

/// n replicates; the result depends only on (spec, partition, n, seed).
Dataset sample_replicates(const HierarchicalSpec& spec, const OrbitPartition& partition, std::size_t n,
                          std::uint64_t seed, const SampleOptions& options = {});

/// n i.i.d. draws from an exact measure on Omega; no latents are recorded.
Dataset sample_from_measure(const ExactMeasure& p, std::size_t n, std::uint64_t seed);

/// Runs body(begin, end) over [0, n) split into contiguous chunks.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body);

}  // namespace modalx

#include "modalx/detail/parallel.hpp"
