#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "modalx/dataset.hpp"
#include "modalx/perm_group.hpp"
#include "modalx/symmetry.hpp"

namespace modalx {

struct TestOptions {
  double alpha = 0.01;
  /// Seeds subset selection and randomization resamples.
  std::uint64_t seed = 0;
  bool bonferroni = true;
  /// Larger orbits are tested on a seeded subset of this many worlds.
  std::size_t max_worlds_per_orbit = 32;
  /// Exchangeability: number of m-subsets per orbit.
  std::size_t max_subsets = 16;
  /// Cap on the dimension of the paired difference vector.
  std::size_t max_dimension = 512;
  /// Below this expected count in some category the randomization test runs.
  double expected_floor = 5.0;
  std::size_t resamples = 10000;
  std::size_t threads = 0;
};

/// One elementary test inside a report (one orbit, generator, or bin).
struct ComponentResult {
  std::string label;
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::string method;
  std::size_t categories = 0;
  std::size_t tuples = 0;
};

struct TestReport {
  std::string name;
  double statistic = 0.0;
  std::string null_distribution;
  /// NaN for deviation-based verdicts.
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double deviation = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  bool pass = true;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
  std::vector<ComponentResult> components;
};

/// Paired homogeneity of the joint law of several world tuples observed on
/// the same replicates. Wald statistic on per-replicate differences of
/// category indicators against the first tuple; chi-square with df equal to
/// the covariance rank. Falls back to a randomization test when an expected
/// count is below the floor; `exchangeable_worlds` selects random relabeling
/// of the listed worlds as the resampling scheme.
ComponentResult paired_homogeneity(const Dataset& data, const std::vector<std::vector<WorldIndex>>& tuples,
                                   const TestOptions& options, std::uint64_t stream_index,
                                   const std::vector<WorldIndex>& exchangeable_worlds);

/// Verdict over p-value components: pass iff the smallest p-value is at least
/// alpha, divided by the component count under Bonferroni.
TestReport summarize_components(std::string name, std::size_t sample_size, const TestOptions& options,
                                std::vector<ComponentResult> components);

/// Equal per-world outcome laws inside every orbit, Bonferroni over orbits.
TestReport test_rigidity(const Dataset& data, const OrbitPartition& partition, const TestOptions& options = {});

/// Joint law of ordered m-tuples of distinct orbit worlds does not depend on
/// which worlds or in which order (m <= 3).
TestReport test_exchangeability(const Dataset& data, const WorldSet& orbit, std::size_t m,
                                const TestOptions& options = {});

/// Law of the projection on `worlds` equals that of the relocated projection,
/// per generator. Empty `worlds` picks up to three points each generator moves.
TestReport test_invariance_mc(const Dataset& data, const std::vector<Permutation>& generators,
                              const std::vector<WorldIndex>& worlds = {}, const TestOptions& options = {});

struct Mode {
  double location = 0.0;     // histogram peak (bin centre)
  double basin_mean = 0.0;   // mean frequency over the mode's basin
  double mass = 0.0;         // fraction of replicates in the basin
};

struct DirectingEstimate {
  /// Per replicate, the fraction of orbit worlds where the atom holds.
  std::vector<double> frequencies;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::size_t> histogram;
  std::vector<Mode> modes;
};

/// Finite surrogate of the orbit's directing measure for one atom.
DirectingEstimate estimate_directing(const Dataset& data, const WorldSet& orbit, std::size_t atom,
                                     std::size_t bins = 50);

/// Per replicate outcome frequency vectors (length 2^k) across the orbit.
std::vector<std::vector<double>> outcome_frequencies(const Dataset& data, const WorldSet& orbit);

/// Local maxima of a smoothed histogram holding at least `min_mass`.
std::vector<Mode> find_modes(const std::vector<double>& values, const std::vector<double>& bin_edges,
                             const std::vector<std::size_t>& histogram, double min_mass = 0.05);

struct CalibrationBin {
  double lower = 0.0, upper = 0.0;
  std::size_t replicates = 0;
  std::size_t observations = 0;
  double mean_theta = 0.0;
  double frequency = 0.0;
  bool evaluated = false;
};

struct CalibrationOptions {
  std::size_t bins = 10;
  double tolerance = 0.02;
  std::size_t min_observations = 1000000;
};

/// Bins replicates by the recorded Theta of `atom` and compares each bin's
/// mean Theta with the observed frequency of the atom over the orbit.
TestReport test_principal_principle(const Dataset& data, const OrbitPartition& partition, std::size_t atom,
                                    const CalibrationOptions& options = {},
                                    std::vector<CalibrationBin>* bins_out = nullptr);

struct BetaShape {
  double a = 1.0, b = 1.0;
  bool operator==(const BetaShape&) const = default;
};

/// Beta shapes per orbit block, per atom.
struct PosteriorState {
  std::vector<std::vector<BetaShape>> shapes;

  static PosteriorState uniform_prior(std::size_t blocks, std::size_t atoms, BetaShape prior = {});
  bool operator==(const PosteriorState&) const = default;
};

/// Conjugate update from the worlds selected by `observed` (all if empty).
/// Orbits without observations come back unchanged.
PosteriorState posterior_update(const Dataset& data, const OrbitPartition& partition,
                                const PosteriorState& prior, const std::vector<bool>& observed = {});

struct OrbitSummary {
  std::size_t block = 0;
  std::size_t size = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct CrossOrbitReport {
  double correlation = 0.0;
  OrbitSummary first, second;
  bool distinct_marginals = false;
  TestReport report;
};

enum class CouplingExpectation { None, Uncorrelated, Correlated };

/// Pearson correlation of within-replicate atom frequencies of two orbits.
/// With an expectation the verdict checks |r| <= tolerance (Uncorrelated) or
/// r >= tolerance (Correlated); otherwise it is informational.
CrossOrbitReport cross_orbit_report(const Dataset& data, const OrbitPartition& partition, std::size_t block_a,
                                    std::size_t block_b, std::size_t atom = 0,
                                    CouplingExpectation expectation = CouplingExpectation::None,
                                    double tolerance = 0.02);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double df);

}  // namespace modalx
