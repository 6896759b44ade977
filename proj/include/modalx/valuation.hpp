#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "modalx/permutation.hpp"

namespace modalx {

/// Outcome at one world: bit l is the truth value of atom l.
using Outcome = std::uint32_t;

/// One outcome per world, in canonical world order.
using Valuation = std::vector<Outcome>;

class AtomSet {
 public:
  AtomSet() = default;
  explicit AtomSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t outcome_count() const noexcept { return std::size_t{1} << names_.size(); }

  bool operator==(const AtomSet&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Omega = ({0,1}^k)^W with the canonical index layout: world-major,
/// atom-minor, little-endian. World w occupies bits [k*w, k*w + k).
class ValuationSpace {
 public:
  /// Limit on k*|W| for anything that materializes Omega.
  static constexpr std::size_t kMaxBits = 24;

  ValuationSpace(std::size_t worlds, std::size_t atoms);

  std::size_t worlds() const noexcept { return worlds_; }
  std::size_t atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return std::size_t{1} << (worlds_ * atoms_); }
  std::size_t outcome_count() const noexcept { return std::size_t{1} << atoms_; }

  std::uint64_t index(const Valuation& v) const;
  Valuation decode(std::uint64_t index) const;
  Outcome outcome_at(std::uint64_t index, std::size_t world) const noexcept {
    return static_cast<Outcome>((index >> (atoms_ * world)) & mask_);
  }

  /// Index of act(perm, decode(index)) without materializing valuations.
  std::uint64_t act_index(const Permutation& perm, std::uint64_t index) const noexcept;

 private:
  std::size_t worlds_;
  std::size_t atoms_;
  std::uint64_t mask_;
};

/// (perm . v)(w) = v(perm^-1(w)).
Valuation act(const Permutation& perm, const Valuation& v);

}  // namespace modalx
