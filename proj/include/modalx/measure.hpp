#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modalx/hierarchical.hpp"
#include "modalx/perm_group.hpp"
#include "modalx/symmetry.hpp"
#include "modalx/valuation.hpp"

namespace modalx {

struct ExactOptions {
  std::size_t max_worlds = 12;
  double tolerance = 1e-12;
};

/// Throws unless a frame of `worlds` worlds with `atoms` atoms fits the exact path.
void check_exact_size(std::size_t worlds, std::size_t atoms, const ExactOptions& options = {});

/// Probability vector over Omega, indexed by ValuationSpace::index.
class ExactMeasure {
 public:
  ExactMeasure(ValuationSpace space, std::vector<double> probabilities, double tolerance = 1e-12);

  static ExactMeasure uniform(const ValuationSpace& space);
  static ExactMeasure point_mass(const ValuationSpace& space, std::uint64_t index);

  const ValuationSpace& space() const noexcept { return space_; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  double operator[](std::uint64_t index) const { return probs_[index]; }

  /// Largest entrywise absolute difference.
  double distance_sup(const ExactMeasure& other) const;
  double total_variation(const ExactMeasure& other) const;

 private:
  ValuationSpace space_;
  std::vector<double> probs_;
};

/// q(act(perm, v)) = p(v).
ExactMeasure pushforward(const ExactMeasure& p, const Permutation& perm);

/// Average of pushforwards over every element; needs an enumerated group.
ExactMeasure symmetrize(const ExactMeasure& p, const PermGroup& group);

struct InvarianceCheck {
  bool invariant = true;
  double max_deviation = 0.0;
};

/// Checks generators only: invariance under them extends to the group.
InvarianceCheck check_invariance_exact(const ExactMeasure& p, const std::vector<Permutation>& generators,
                                       double tolerance = 1e-12);
InvarianceCheck check_invariance_exact(const ExactMeasure& p, const PermGroup& group,
                                       double tolerance = 1e-12);

struct ErgodicComponent {
  double weight = 0.0;
  std::vector<std::uint64_t> support;  // one orbit of Omega, ascending
};

struct ErgodicDecomposition {
  std::vector<ErgodicComponent> components;  // ordered by smallest support index

  /// Sum of weight times the uniform measure on each support.
  ExactMeasure reconstruct(const ValuationSpace& space) const;
};

/// Splits an invariant measure into uniform measures on group orbits of Omega.
ErgodicDecomposition ergodic_decompose(const ExactMeasure& p, const PermGroup& group,
                                       double tolerance = 1e-12);

/// Exact law of the hierarchical model for finitely supported priors. Worlds
/// outside every block follow the designated law.
ExactMeasure exact_hier_measure(const HierarchicalSpec& spec, const OrbitPartition& partition,
                                const ExactOptions& options = {});

/// Outcome distribution (length 2^k) at one world.
std::vector<double> marginal(const ExactMeasure& p, std::size_t world);

/// Joint outcome distribution of an ordered tuple of worlds; the outcome at
/// tuple[i] occupies bits [k*i, k*i + k) of the result index.
std::vector<double> joint_marginal(const ExactMeasure& p, const std::vector<std::size_t>& worlds);

/// CSV with header `valuation_index,probability`; unlisted indices are 0.
ExactMeasure read_measure_csv(const std::filesystem::path& path, const ValuationSpace& space,
                              double tolerance = 1e-9);
std::string measure_csv(const ExactMeasure& p);

}  // namespace modalx
