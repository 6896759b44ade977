#include "modalx/frame.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "modalx/error.hpp"

namespace modalx {

namespace {

bool valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_';
  });
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  return tokens;
}

void transitive_closure(std::vector<std::uint8_t>& rel, std::size_t n) {
  // Warshall; a single pass over intermediate points reaches the fixpoint.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (!rel[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (rel[k * n + j]) rel[i * n + j] = 1;
    }
}

}  // namespace

Frame::Frame(std::string name, std::vector<std::string> worlds,
             std::vector<std::uint8_t> relation, WorldIndex designated)
    : name_(std::move(name)),
      worlds_(std::move(worlds)),
      relation_(std::move(relation)),
      designated_(designated) {
  if (worlds_.empty()) throw Error("frame has no worlds");
  if (relation_.size() != worlds_.size() * worlds_.size())
    throw Error("relation matrix must be |W| x |W|");
  if (designated_ >= worlds_.size()) throw Error("designated world out of range");
  std::unordered_set<std::string_view> seen;
  for (const auto& w : worlds_) {
    if (!valid_identifier(w)) throw Error("invalid world identifier '" + w + "'");
    if (!seen.insert(w).second) throw Error("duplicate world '" + w + "'");
  }
  for (auto& cell : relation_) cell = cell ? 1 : 0;
}

std::optional<WorldIndex> Frame::find_world(std::string_view id) const {
  auto it = std::find(worlds_.begin(), worlds_.end(), id);
  if (it == worlds_.end()) return std::nullopt;
  return static_cast<WorldIndex>(it - worlds_.begin());
}

std::string_view to_string(FrameLabel label) noexcept {
  switch (label) {
    case FrameLabel::S5:
      return "S5";
    case FrameLabel::S4NotS5:
      return "S4-not-S5";
    case FrameLabel::NotS4:
      break;
  }
  return "not-S4";
}

Frame parse_frame(std::string_view text) {
  std::string name = "frame";
  std::vector<std::string> worlds;
  std::unordered_map<std::string, WorldIndex> index;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::size_t> edge_lines;
  std::optional<std::string> designated;
  bool close_reflexive = false;
  bool close_transitive = false;
  bool ended = false;

  auto lookup = [&](const std::string& id, std::size_t line_no) {
    if (id == "*") return;
    if (!index.count(id)) throw ParseError(line_no, "unknown world '" + id + "'");
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_tokens(line);
    if (tok.empty()) continue;
    if (ended) throw ParseError(line_no, "content after 'end'");

    const auto& kw = tok[0];
    auto expect = [&](std::size_t count) {
      if (tok.size() != count)
        throw ParseError(line_no, "malformed '" + kw + "' directive: expected " +
                                      std::to_string(count - 1) + " argument(s)");
    };

    if (kw == "frame") {
      expect(2);
      name = tok[1];
    } else if (kw == "world") {
      expect(2);
      if (!valid_identifier(tok[1]))
        throw ParseError(line_no, "invalid world identifier '" + tok[1] + "'");
      if (index.count(tok[1])) throw ParseError(line_no, "duplicate world '" + tok[1] + "'");
      index.emplace(tok[1], static_cast<WorldIndex>(worlds.size()));
      worlds.push_back(tok[1]);
    } else if (kw == "designated") {
      expect(2);
      if (designated) throw ParseError(line_no, "duplicate 'designated' directive");
      if (!index.count(tok[1])) throw ParseError(line_no, "unknown world '" + tok[1] + "'");
      designated = tok[1];
    } else if (kw == "edge" || kw == "biedge") {
      expect(3);
      lookup(tok[1], line_no);
      lookup(tok[2], line_no);
      edges.emplace_back(tok[1], tok[2]);
      edge_lines.push_back(line_no);
      if (kw == "biedge") {
        edges.emplace_back(tok[2], tok[1]);
        edge_lines.push_back(line_no);
      }
    } else if (kw == "close") {
      expect(2);
      if (tok[1] == "reflexive")
        close_reflexive = true;
      else if (tok[1] == "transitive")
        close_transitive = true;
      else
        throw ParseError(line_no, "unknown closure '" + tok[1] + "'");
    } else if (kw == "end") {
      expect(1);
      ended = true;
    } else {
      throw ParseError(line_no, "unknown directive '" + kw + "'");
    }
  }

  if (worlds.empty()) throw ParseError(line_no, "frame declares no worlds");
  if (!designated) throw ParseError(line_no, "missing 'designated' directive");

  const std::size_t n = worlds.size();
  std::vector<std::uint8_t> rel(n * n, 0);
  for (const auto& [src, dst] : edges) {
    std::vector<WorldIndex> from, to;
    auto expand = [&](const std::string& id, std::vector<WorldIndex>& out) {
      if (id == "*") {
        for (WorldIndex w = 0; w < n; ++w) out.push_back(w);
      } else {
        out.push_back(index.at(id));
      }
    };
    expand(src, from);
    expand(dst, to);
    for (auto a : from)
      for (auto b : to) rel[static_cast<std::size_t>(a) * n + b] = 1;
  }
  if (close_reflexive)
    for (std::size_t i = 0; i < n; ++i) rel[i * n + i] = 1;
  if (close_transitive) transitive_closure(rel, n);

  return Frame(std::move(name), std::move(worlds), std::move(rel), index.at(*designated));
}

Frame load_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open frame file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_frame(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string serialize_frame(const Frame& frame) {
  std::ostringstream out;
  const auto n = frame.size();
  out << "frame " << frame.name() << '\n';
  for (const auto& w : frame.worlds()) out << "world " << w << '\n';
  out << "designated " << frame.world(frame.designated()) << '\n';
  for (WorldIndex i = 0; i < n; ++i) {
    bool full = true;
    for (WorldIndex j = 0; j < n && full; ++j) full = frame.related(i, j);
    if (full) {
      out << "edge " << frame.world(i) << " *\n";
      continue;
    }
    for (WorldIndex j = 0; j < n; ++j)
      if (frame.related(i, j)) out << "edge " << frame.world(i) << ' ' << frame.world(j) << '\n';
  }
  out << "end\n";
  return out.str();
}

FrameClass classify(const Frame& frame) {
  const auto n = static_cast<WorldIndex>(frame.size());
  FrameClass fc;
  fc.reflexive = true;
  for (WorldIndex i = 0; i < n && fc.reflexive; ++i) fc.reflexive = frame.related(i, i);
  fc.symmetric = true;
  for (WorldIndex i = 0; i < n && fc.symmetric; ++i)
    for (WorldIndex j = i + 1; j < n && fc.symmetric; ++j)
      fc.symmetric = frame.related(i, j) == frame.related(j, i);
  fc.transitive = true;
  for (WorldIndex i = 0; i < n && fc.transitive; ++i)
    for (WorldIndex j = 0; j < n && fc.transitive; ++j) {
      if (!frame.related(i, j)) continue;
      for (WorldIndex k = 0; k < n; ++k)
        if (frame.related(j, k) && !frame.related(i, k)) {
          fc.transitive = false;
          break;
        }
    }
  if (fc.reflexive && fc.transitive)
    fc.label = fc.symmetric ? FrameLabel::S5 : FrameLabel::S4NotS5;
  else
    fc.label = FrameLabel::NotS4;
  return fc;
}

WorldSet accessible_cluster(const Frame& frame, WorldIndex w) {
  if (w >= frame.size()) throw Error("world index out of range");
  WorldSet out;
  for (WorldIndex v = 0; v < frame.size(); ++v)
    if (frame.related(w, v)) out.push_back(v);
  return out;
}

}  // namespace modalx
