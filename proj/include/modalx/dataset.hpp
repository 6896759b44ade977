#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modalx/hierarchical.hpp"

namespace modalx {

/// 64-bit FNV-1a, used for input fingerprints in reports and datasets.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string fingerprint_hex(std::string_view bytes);

/// Where each block's directing measure lives inside a replicate's latent row:
/// k doubles (theta per atom) for Bernoulli products, 2^k for full measures.
struct LatentLayout {
  std::size_t atoms = 0;
  std::vector<DirectingMeasure::Form> forms;
  std::vector<std::size_t> offsets;
  std::size_t width = 0;

  static LatentLayout for_forms(std::size_t atoms, std::vector<DirectingMeasure::Form> forms);
  std::size_t blocks() const noexcept { return forms.size(); }
  std::size_t block_width(std::size_t block) const noexcept {
    return forms[block] == DirectingMeasure::Form::Full ? std::size_t{1} << atoms : atoms;
  }
  bool operator==(const LatentLayout&) const = default;
};

/// Replicates of a sampled (or externally supplied) model: one outcome per
/// world per replicate, plus the latent directing measures when known.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t worlds, std::size_t atoms, std::size_t replicates, LatentLayout layout,
          bool with_latents);

  std::size_t worlds() const noexcept { return worlds_; }
  std::size_t atoms() const noexcept { return atoms_; }
  std::size_t replicates() const noexcept { return replicates_; }
  bool has_latents() const noexcept { return has_latents_; }
  const LatentLayout& layout() const noexcept { return layout_; }

  Outcome outcome(std::size_t replicate, std::size_t world) const noexcept {
    return outcomes_[replicate * worlds_ + world];
  }
  std::span<std::uint16_t> outcomes_of(std::size_t replicate) noexcept {
    return {outcomes_.data() + replicate * worlds_, worlds_};
  }
  std::span<const std::uint16_t> outcomes_of(std::size_t replicate) const noexcept {
    return {outcomes_.data() + replicate * worlds_, worlds_};
  }
  void set_outcome(std::size_t replicate, std::size_t world, Outcome o) {
    outcomes_[replicate * worlds_ + world] = static_cast<std::uint16_t>(o);
  }

  std::span<double> latents_of(std::size_t replicate) noexcept {
    return {latents_.data() + replicate * layout_.width, layout_.width};
  }
  std::span<const double> latents_of(std::size_t replicate) const noexcept {
    return {latents_.data() + replicate * layout_.width, layout_.width};
  }
  /// Recorded directing measure of `block` in `replicate`.
  DirectingMeasure latent(std::size_t replicate, std::size_t block) const;
  /// Recorded marginal probability of `atom` under that measure.
  double latent_theta(std::size_t replicate, std::size_t block, std::size_t atom) const;

  std::uint64_t seed = 0;
  std::string spec_fingerprint;
  std::vector<std::string> atom_names;
  std::vector<std::string> world_names;

  /// Concatenation of replicates; layouts and shapes must agree.
  static Dataset concat(const Dataset& a, const Dataset& b);

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t worlds_ = 0;
  std::size_t atoms_ = 0;
  std::size_t replicates_ = 0;
  LatentLayout layout_;
  bool has_latents_ = false;
  std::vector<double> latents_;
  std::vector<std::uint16_t> outcomes_;
};

/// CSV: `#` metadata lines, then a header `replicate,<latent columns>,<world
/// names>` and one row per replicate. Latent columns are named
/// `o<block>_theta_<atom>` or `o<block>_p_<outcome>`; world cells hold the
/// outcome as an integer whose bit l is atom l.
std::string dataset_csv(const Dataset& data);
void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace modalx
