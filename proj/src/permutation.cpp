#include "modalx/permutation.hpp"

#include "modalx/error.hpp"

namespace modalx {

Permutation::Permutation(std::vector<WorldIndex> image) : image_(std::move(image)) {
  std::vector<bool> hit(image_.size(), false);
  for (auto x : image_) {
    if (x >= image_.size() || hit[x]) throw Error("image is not a bijection");
    hit[x] = true;
  }
}

Permutation Permutation::identity(std::size_t degree) {
  std::vector<WorldIndex> img(degree);
  for (std::size_t i = 0; i < degree; ++i) img[i] = static_cast<WorldIndex>(i);
  return from_image_unchecked(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<WorldIndex> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<WorldIndex>(i);
  return from_image_unchecked(std::move(inv));
}

bool Permutation::is_identity() const noexcept { return first_moved_point() == degree(); }

std::size_t Permutation::first_moved_point() const noexcept {
  for (std::size_t i = 0; i < image_.size(); ++i)
    if (image_[i] != i) return i;
  return image_.size();
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) throw Error("degree mismatch in composition");
  std::vector<WorldIndex> img(b.degree());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = a.image_[b.image_[i]];
  return Permutation::from_image_unchecked(std::move(img));
}

WorldIndex Permutation::power_image(WorldIndex x, std::size_t exponent) const {
  std::size_t cycle_length = 1;
  for (WorldIndex y = image_[x]; y != x; y = image_[y]) ++cycle_length;
  WorldIndex y = x;
  for (std::size_t step = exponent % cycle_length; step > 0; --step) y = image_[y];
  return y;
}

}  // namespace modalx
