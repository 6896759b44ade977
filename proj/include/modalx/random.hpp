#pragma once

#include <cstdint>
#include <vector>

namespace modalx {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent streams are addressed by (seed, replicate, purpose, index), so
/// any replicate can be regenerated without touching the others.
///
/// Algorithms: SplitMix64 state stepping; uniforms from the top 53 bits;
/// normals by the Marsaglia polar method; gamma by Marsaglia-Tsang with the
/// U^(1/a) boost for shape < 1; beta as X/(X+Y) of gammas; Dirichlet as
/// normalized gammas.
class RandomStream {
 public:
  enum Purpose : std::uint64_t { kLatent = 1, kJoint = 2, kValues = 3, kResample = 4, kSubset = 5 };

  explicit RandomStream(std::uint64_t key) noexcept : state_(key) {}

  static RandomStream derive(std::uint64_t seed, std::uint64_t replicate, std::uint64_t purpose,
                             std::uint64_t index) noexcept {
    std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
    k = mix64(k ^ (replicate + 0x632be59bd9b4e019ULL));
    k = mix64(k ^ (purpose * 0x8cb92ba72f3d8dd7ULL));
    k = mix64(k ^ (index + 0xd6e8feb86659fd93ULL));
    return RandomStream(k);
  }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) noexcept;

  double normal() noexcept;
  double gamma(double shape) noexcept;
  double beta(double a, double b) noexcept;
  std::vector<double> dirichlet(const std::vector<double>& alpha) noexcept;

  /// Index i with probability weights[i] / sum (inverse CDF over a prefix sum).
  std::size_t categorical(const std::vector<double>& cumulative) noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Prefix sums for RandomStream::categorical.
std::vector<double> cumulative(const std::vector<double>& weights);

}  // namespace modalx
