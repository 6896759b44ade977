#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modalx {

using WorldIndex = std::uint32_t;

/// Ascending, duplicate-free list of world indices.
using WorldSet = std::vector<WorldIndex>;

/// A finite Kripke frame with a designated world.
///
/// World order is the order of declaration; it is the canonical order used
/// for relation matrices and valuation indexing everywhere else.
class Frame {
 public:
  /// `relation` is row-major |W|x|W|; entry (i, j) is nonzero iff R(w_i, w_j).
  Frame(std::string name, std::vector<std::string> worlds,
        std::vector<std::uint8_t> relation, WorldIndex designated);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return worlds_.size(); }
  const std::vector<std::string>& worlds() const noexcept { return worlds_; }
  const std::string& world(WorldIndex w) const { return worlds_.at(w); }
  WorldIndex designated() const noexcept { return designated_; }

  bool related(WorldIndex from, WorldIndex to) const noexcept {
    return relation_[static_cast<std::size_t>(from) * worlds_.size() + to] != 0;
  }
  const std::vector<std::uint8_t>& relation() const noexcept { return relation_; }

  std::optional<WorldIndex> find_world(std::string_view id) const;

  bool operator==(const Frame&) const = default;

 private:
  std::string name_;
  std::vector<std::string> worlds_;
  std::vector<std::uint8_t> relation_;
  WorldIndex designated_;
};

enum class FrameLabel { S5, S4NotS5, NotS4 };

std::string_view to_string(FrameLabel label) noexcept;

struct FrameClass {
  bool reflexive = false;
  bool transitive = false;
  bool symmetric = false;
  FrameLabel label = FrameLabel::NotS4;
};

/// Parses the line-oriented frame DSL:
///
///     frame <name>
///     world <id>            one per line, id = [A-Za-z0-9_]+
///     designated <id>
///     edge <src> <dst>      either side may be `*` (all worlds)
///     biedge <a> <b>
///     close reflexive
///     close transitive
///     end
///
/// `#` starts a comment. Closure directives are applied after all edges are
/// read, reflexive first. Errors carry the offending line number.
Frame parse_frame(std::string_view text);

Frame load_frame(const std::filesystem::path& path);

/// Emits a document that parses back to an identical Frame. Rows that are
/// entirely true use the `edge <src> *` shorthand.
std::string serialize_frame(const Frame& frame);

FrameClass classify(const Frame& frame);

/// {v : R(w, v)}, read off row w.
WorldSet accessible_cluster(const Frame& frame, WorldIndex w);

}  // namespace modalx
