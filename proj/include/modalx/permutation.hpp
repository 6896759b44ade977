#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "modalx/frame.hpp"

namespace modalx {

/// A bijection of {0, ..., degree-1}, stored as its image array.
class Permutation {
 public:
  Permutation() = default;

  /// Throws modalx::Error unless `image` is a bijection of 0..size-1.
  explicit Permutation(std::vector<WorldIndex> image);

  static Permutation identity(std::size_t degree);

  /// Skips validation; for callers that construct images by composition.
  static Permutation from_image_unchecked(std::vector<WorldIndex> image) {
    Permutation p;
    p.image_ = std::move(image);
    return p;
  }

  std::size_t degree() const noexcept { return image_.size(); }
  WorldIndex operator()(WorldIndex x) const noexcept { return image_[x]; }
  const std::vector<WorldIndex>& image() const noexcept { return image_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  /// Smallest point not fixed, or degree() for the identity.
  std::size_t first_moved_point() const noexcept;

  /// (a * b)(x) = a(b(x)).
  friend Permutation operator*(const Permutation& a, const Permutation& b);

  /// Image of x under this permutation raised to `exponent`.
  WorldIndex power_image(WorldIndex x, std::size_t exponent) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<WorldIndex> image_;
};

}  // namespace modalx
