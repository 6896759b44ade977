#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "modalx/permutation.hpp"

namespace modalx {

using GroupOrder = boost::multiprecision::cpp_int;

inline constexpr std::size_t kDefaultEnumerationBound = 100000;

/// The frame a group was derived from: the group is the pointwise stabilizer
/// of `fixed` inside Aut(relation). Lets derived computations (restriction
/// orders) rerun the structural search instead of generic group algorithms.
struct FrameSource {
  std::size_t degree = 0;
  std::vector<std::uint8_t> relation;
  std::vector<WorldIndex> fixed;
};

/// A finite permutation group held as a base and strong generating set,
/// with an optional full element list.
class PermGroup {
 public:
  /// Deterministic Schreier-Sims: base points are chosen in ascending order.
  static PermGroup from_generators(std::size_t degree, std::vector<Permutation> generators,
                                   std::size_t enumeration_bound = kDefaultEnumerationBound);

  /// Trusts that `strong_generators` is a strong generating set relative to
  /// `base` with the given basic orbit sizes.
  static PermGroup from_chain(std::size_t degree, std::vector<WorldIndex> base,
                              std::vector<std::size_t> basic_orbit_sizes,
                              std::vector<Permutation> strong_generators,
                              std::size_t enumeration_bound = kDefaultEnumerationBound);

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<Permutation>& generators() const noexcept { return generators_; }
  const std::vector<WorldIndex>& base() const noexcept { return base_; }
  const std::vector<std::size_t>& basic_orbit_sizes() const noexcept { return orbit_sizes_; }
  const GroupOrder& order() const noexcept { return order_; }
  std::string order_string() const { return order_.str(); }

  bool enumerated() const noexcept { return elements_.has_value(); }
  /// Sorted lexicographically by image. Throws if not enumerated.
  const std::vector<Permutation>& elements() const;

  /// Enumerates regardless of the bound used at construction.
  void enumerate();

  /// Membership by sifting through the stabilizer chain.
  bool contains(const Permutation& p) const;

  const std::shared_ptr<const FrameSource>& source() const noexcept { return source_; }
  void set_source(std::shared_ptr<const FrameSource> source) { source_ = std::move(source); }

 private:
  std::size_t degree_ = 0;
  std::vector<WorldIndex> base_;
  std::vector<std::size_t> orbit_sizes_;
  std::vector<Permutation> generators_;
  GroupOrder order_ = 1;
  std::optional<std::vector<Permutation>> elements_;
  std::shared_ptr<const FrameSource> source_;
};

}  // namespace modalx
