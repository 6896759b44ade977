#include "modalx/valuation.hpp"

#include <unordered_set>

#include "modalx/error.hpp"

namespace modalx {

AtomSet::AtomSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw Error("atom set must contain at least one atom");
  if (names_.size() > 16) throw Error("at most 16 atoms are supported");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_)
    if (n.empty() || !seen.insert(n).second) throw Error("atom names must be unique and non-empty");
}

ValuationSpace::ValuationSpace(std::size_t worlds, std::size_t atoms)
    : worlds_(worlds), atoms_(atoms), mask_((std::uint64_t{1} << atoms) - 1) {
  if (atoms == 0) throw Error("valuation space needs at least one atom");
  if (worlds * atoms > kMaxBits)
    throw Error("valuation space 2^(" + std::to_string(atoms) + "*" + std::to_string(worlds) +
                ") exceeds the exact-path limit of 2^" + std::to_string(kMaxBits) + " states");
}

std::uint64_t ValuationSpace::index(const Valuation& v) const {
  if (v.size() != worlds_) throw Error("valuation length does not match world count");
  std::uint64_t idx = 0;
  for (std::size_t w = 0; w < worlds_; ++w) {
    if (v[w] > mask_) throw Error("outcome out of range for atom count");
    idx |= static_cast<std::uint64_t>(v[w]) << (atoms_ * w);
  }
  return idx;
}

Valuation ValuationSpace::decode(std::uint64_t index) const {
  Valuation v(worlds_);
  for (std::size_t w = 0; w < worlds_; ++w) v[w] = outcome_at(index, w);
  return v;
}

std::uint64_t ValuationSpace::act_index(const Permutation& perm, std::uint64_t index) const noexcept {
  // (perm . V)(perm(w)) = V(w): the block at w moves to perm(w).
  std::uint64_t out = 0;
  for (std::size_t w = 0; w < worlds_; ++w)
    out |= static_cast<std::uint64_t>(outcome_at(index, w)) << (atoms_ * perm(static_cast<WorldIndex>(w)));
  return out;
}

Valuation act(const Permutation& perm, const Valuation& v) {
  if (perm.degree() != v.size()) throw Error("permutation degree does not match valuation length");
  Valuation out(v.size());
  for (std::size_t w = 0; w < v.size(); ++w) out[perm(static_cast<WorldIndex>(w))] = v[w];
  return out;
}

}  // namespace modalx
