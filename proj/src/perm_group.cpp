#include "modalx/perm_group.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "modalx/error.hpp"

namespace modalx {

namespace {

// One level of a stabilizer chain: the basic orbit of `point` under the
// generators that fix all earlier base points, with coset representatives.
struct ChainLevel {
  WorldIndex point = 0;
  std::vector<std::size_t> generators;  // indices into the strong generating set
  std::vector<WorldIndex> orbit;
  std::vector<std::optional<Permutation>> rep;  // rep[x] maps point to x
};

class Chain {
 public:
  explicit Chain(std::size_t degree) : degree_(degree) {}

  std::vector<ChainLevel>& levels() { return levels_; }
  const std::vector<ChainLevel>& levels() const { return levels_; }
  const std::vector<Permutation>& strong() const { return strong_; }

  void add_level(WorldIndex point) {
    ChainLevel level;
    level.point = point;
    level.orbit = {point};
    level.rep.assign(degree_, std::nullopt);
    level.rep[point] = Permutation::identity(degree_);
    levels_.push_back(std::move(level));
  }

  // Appends h to the strong generating set as a member of every level up to
  // and including `depth` (h fixes all earlier base points there).
  void add_strong(Permutation h, std::size_t depth) {
    if (depth == levels_.size()) add_level(static_cast<WorldIndex>(h.first_moved_point()));
    strong_.push_back(std::move(h));
    for (std::size_t l = 0; l <= depth; ++l) {
      levels_[l].generators.push_back(strong_.size() - 1);
      extend_orbit(levels_[l]);
    }
  }

  void extend_orbit(ChainLevel& level) const {
    for (std::size_t pos = 0; pos < level.orbit.size(); ++pos) {
      const WorldIndex delta = level.orbit[pos];
      for (auto gi : level.generators) {
        const auto& s = strong_[gi];
        const WorldIndex image = s(delta);
        if (level.rep[image]) continue;
        level.rep[image] = s * *level.rep[delta];
        level.orbit.push_back(image);
      }
    }
  }

  // Returns the residue of g after stripping levels [from, end) and the level
  // at which stripping stopped.
  std::pair<Permutation, std::size_t> sift(Permutation g, std::size_t from) const {
    for (std::size_t i = from; i < levels_.size(); ++i) {
      const auto& level = levels_[i];
      const WorldIndex x = g(level.point);
      if (!level.rep[x]) return {std::move(g), i};
      g = level.rep[x]->inverse() * g;
    }
    return {std::move(g), levels_.size()};
  }

  // Rebuilds levels from a base and a strong generating set.
  static Chain from_strong(std::size_t degree, const std::vector<WorldIndex>& base,
                           const std::vector<Permutation>& strong) {
    Chain chain(degree);
    chain.strong_ = strong;
    for (std::size_t i = 0; i < base.size(); ++i) {
      chain.add_level(base[i]);
      auto& level = chain.levels_.back();
      for (std::size_t g = 0; g < strong.size(); ++g) {
        bool fixes_prefix = true;
        for (std::size_t j = 0; j < i && fixes_prefix; ++j)
          fixes_prefix = strong[g](base[j]) == base[j];
        if (fixes_prefix) level.generators.push_back(g);
      }
      chain.extend_orbit(level);
    }
    return chain;
  }

 private:
  std::size_t degree_;
  std::vector<ChainLevel> levels_;
  std::vector<Permutation> strong_;
};

std::vector<Permutation> enumerate_chain(const Chain& chain, std::size_t degree) {
  std::vector<Permutation> current{Permutation::identity(degree)};
  const auto& levels = chain.levels();
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    std::vector<Permutation> next;
    next.reserve(current.size() * it->orbit.size());
    for (auto x : it->orbit)
      for (const auto& e : current) next.push_back(*it->rep[x] * e);
    current = std::move(next);
  }
  std::sort(current.begin(), current.end());
  return current;
}

void check_degrees(std::size_t degree, const std::vector<Permutation>& perms) {
  for (const auto& p : perms)
    if (p.degree() != degree) throw Error("generator degree does not match group degree");
}

}  // namespace

PermGroup PermGroup::from_generators(std::size_t degree, std::vector<Permutation> generators,
                                     std::size_t enumeration_bound) {
  check_degrees(degree, generators);
  Chain chain(degree);
  for (auto& g : generators) {
    if (g.is_identity()) continue;
    auto [h, depth] = chain.sift(std::move(g), 0);
    if (!h.is_identity()) chain.add_strong(std::move(h), depth);
  }

  // Schreier generators are checked bottom-up; a pair (orbit position,
  // generator slot) stays valid once checked because representatives of
  // existing orbit points never change.
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> checked;
  bool changed = true;
  while (changed) {
    changed = false;
    checked.resize(chain.levels().size());
    for (std::size_t l = chain.levels().size(); l-- > 0 && !changed;) {
      for (std::size_t p = 0; p < chain.levels()[l].orbit.size() && !changed; ++p) {
        for (std::size_t q = 0; q < chain.levels()[l].generators.size(); ++q) {
          if (!checked[l].emplace(p, q).second) continue;
          const auto& level = chain.levels()[l];
          const WorldIndex delta = level.orbit[p];
          const auto& s = chain.strong()[level.generators[q]];
          Permutation schreier = level.rep[s(delta)]->inverse() * s * *level.rep[delta];
          auto [h, depth] = chain.sift(std::move(schreier), l + 1);
          if (!h.is_identity()) {
            chain.add_strong(std::move(h), depth);
            changed = true;
            break;
          }
        }
      }
    }
  }

  std::vector<WorldIndex> base;
  std::vector<std::size_t> sizes;
  for (const auto& level : chain.levels()) {
    base.push_back(level.point);
    sizes.push_back(level.orbit.size());
  }
  return from_chain(degree, std::move(base), std::move(sizes), chain.strong(), enumeration_bound);
}

PermGroup PermGroup::from_chain(std::size_t degree, std::vector<WorldIndex> base,
                                std::vector<std::size_t> basic_orbit_sizes,
                                std::vector<Permutation> strong_generators,
                                std::size_t enumeration_bound) {
  if (base.size() != basic_orbit_sizes.size()) throw Error("base and orbit sizes differ in length");
  check_degrees(degree, strong_generators);
  PermGroup g;
  g.degree_ = degree;
  g.base_ = std::move(base);
  g.orbit_sizes_ = std::move(basic_orbit_sizes);
  g.generators_ = std::move(strong_generators);
  g.order_ = 1;
  for (auto s : g.orbit_sizes_) g.order_ *= s;
  if (g.order_ <= enumeration_bound) g.enumerate();
  return g;
}

const std::vector<Permutation>& PermGroup::elements() const {
  if (!elements_) throw Error("group is not enumerated (order " + order_.str() + ")");
  return *elements_;
}

void PermGroup::enumerate() {
  if (elements_) return;
  const auto chain = Chain::from_strong(degree_, base_, generators_);
  elements_ = enumerate_chain(chain, degree_);
}

bool PermGroup::contains(const Permutation& p) const {
  if (p.degree() != degree_) return false;
  if (elements_) return std::binary_search(elements_->begin(), elements_->end(), p);
  const auto chain = Chain::from_strong(degree_, base_, generators_);
  return chain.sift(p, 0).first.is_identity();
}

}  // namespace modalx
