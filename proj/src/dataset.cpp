#include "modalx/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "modalx/error.hpp"

namespace modalx {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

LatentLayout LatentLayout::for_forms(std::size_t atoms, std::vector<DirectingMeasure::Form> forms) {
  LatentLayout l;
  l.atoms = atoms;
  l.forms = std::move(forms);
  for (std::size_t b = 0; b < l.forms.size(); ++b) {
    l.offsets.push_back(l.width);
    l.width += l.block_width(b);
  }
  return l;
}

Dataset::Dataset(std::size_t worlds, std::size_t atoms, std::size_t replicates, LatentLayout layout,
                 bool with_latents)
    : worlds_(worlds),
      atoms_(atoms),
      replicates_(replicates),
      layout_(std::move(layout)),
      has_latents_(with_latents),
      latents_(with_latents ? replicates * layout_.width : 0, 0.0),
      outcomes_(replicates * worlds, 0) {
  if (atoms == 0 || atoms > 16) throw Error("dataset needs 1..16 atoms");
  if (with_latents && layout_.atoms != atoms) throw Error("latent layout does not match the atom count");
}

DirectingMeasure Dataset::latent(std::size_t replicate, std::size_t block) const {
  if (!has_latents_) throw Error("dataset has no recorded latents");
  if (block >= layout_.blocks()) throw Error("block index out of range");
  const auto row = latents_of(replicate);
  const auto* first = row.data() + layout_.offsets[block];
  std::vector<double> params(first, first + layout_.block_width(block));
  return layout_.forms[block] == DirectingMeasure::Form::Full ? DirectingMeasure::full(std::move(params))
                                                               : DirectingMeasure::bernoulli(std::move(params));
}

double Dataset::latent_theta(std::size_t replicate, std::size_t block, std::size_t atom) const {
  if (!has_latents_) throw Error("dataset has no recorded latents");
  if (block >= layout_.blocks() || atom >= atoms_) throw Error("latent index out of range");
  const auto* p = latents_of(replicate).data() + layout_.offsets[block];
  if (layout_.forms[block] == DirectingMeasure::Form::BernoulliProduct) return p[atom];
  double theta = 0.0;
  for (std::size_t o = 0; o < (std::size_t{1} << atoms_); ++o)
    if ((o >> atom) & 1u) theta += p[o];
  return theta;
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.worlds_ != b.worlds_ || a.atoms_ != b.atoms_ || a.has_latents_ != b.has_latents_ ||
      (a.has_latents_ && !(a.layout_ == b.layout_)))
    throw Error("datasets have different shapes");
  Dataset out = a;
  out.replicates_ += b.replicates_;
  out.latents_.insert(out.latents_.end(), b.latents_.begin(), b.latents_.end());
  out.outcomes_.insert(out.outcomes_.end(), b.outcomes_.begin(), b.outcomes_.end());
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string dataset_csv(const Dataset& data) {
  std::string out = "# modalx dataset v1\n";
  out += "# seed=" + std::to_string(data.seed) + "\n";
  out += "# spec_fingerprint=" + data.spec_fingerprint + "\n";
  out += "# atoms=";
  for (std::size_t l = 0; l < data.atoms(); ++l) {
    if (l) out += ' ';
    out += l < data.atom_names.size() ? data.atom_names[l] : "a" + std::to_string(l);
  }
  out += "\n# latent_forms=";
  if (data.has_latents())
    for (std::size_t b = 0; b < data.layout().blocks(); ++b) {
      if (b) out += ' ';
      out += data.layout().forms[b] == DirectingMeasure::Form::Full ? "full" : "bern";
    }
  out += "\nreplicate";
  if (data.has_latents())
    for (std::size_t b = 0; b < data.layout().blocks(); ++b)
      for (std::size_t i = 0; i < data.layout().block_width(b); ++i)
        out += ",o" + std::to_string(b) +
               (data.layout().forms[b] == DirectingMeasure::Form::Full ? "_p_" : "_theta_") + std::to_string(i);
  for (std::size_t w = 0; w < data.worlds(); ++w)
    out += "," + (w < data.world_names.size() ? data.world_names[w] : "w" + std::to_string(w));
  out += '\n';

  char buf[64];
  for (std::size_t r = 0; r < data.replicates(); ++r) {
    out += std::to_string(r);
    if (data.has_latents())
      for (double x : data.latents_of(r)) {
        std::snprintf(buf, sizeof buf, ",%.17g", x);
        out += buf;
      }
    for (auto o : data.outcomes_of(r)) {
      out += ',';
      out += std::to_string(o);
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path.string() + "'");
  out << dataset_csv(data);
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::vector<std::string> atoms;
  std::vector<DirectingMeasure::Form> forms;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const auto key = body.substr(body.find_first_not_of(' '), eq - body.find_first_not_of(' '));
      std::istringstream value(body.substr(eq + 1));
      if (key == "seed") {
        value >> seed;
      } else if (key == "spec_fingerprint") {
        value >> fingerprint;
      } else if (key == "atoms") {
        for (std::string a; value >> a;) atoms.push_back(a);
      } else if (key == "latent_forms") {
        for (std::string f; value >> f;) {
          if (f != "full" && f != "bern") throw ParseError(line_no, "unknown latent form '" + f + "'");
          forms.push_back(f == "full" ? DirectingMeasure::Form::Full : DirectingMeasure::Form::BernoulliProduct);
        }
      }
      continue;
    }
    if (header.empty()) {
      header = split(line, ',');
      if (header.empty() || header[0] != "replicate") throw ParseError(line_no, "expected a 'replicate,...' header");
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw ParseError(line_no, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                    std::to_string(header.size()));
    rows.push_back(std::move(cells));
  }
  if (header.empty()) throw Error("dataset '" + path.string() + "' has no header");
  if (atoms.empty()) throw Error("dataset '" + path.string() + "' does not declare its atoms");

  auto layout = LatentLayout::for_forms(atoms.size(), forms);
  const bool with_latents = !forms.empty();
  const std::size_t latent_cols = with_latents ? layout.width : 0;
  if (header.size() < 1 + latent_cols) throw Error("dataset header is too short for its latent layout");
  const std::size_t worlds = header.size() - 1 - latent_cols;
  Dataset data(worlds, atoms.size(), rows.size(), layout, with_latents);
  data.seed = seed;
  data.spec_fingerprint = fingerprint;
  data.atom_names = atoms;
  data.world_names.assign(header.begin() + 1 + static_cast<std::ptrdiff_t>(latent_cols), header.end());
  const unsigned long max_outcome = (1ul << atoms.size()) - 1;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    try {
      auto lat = with_latents ? data.latents_of(r) : std::span<double>{};
      for (std::size_t i = 0; i < latent_cols; ++i) lat[i] = std::stod(cells[1 + i]);
      for (std::size_t w = 0; w < worlds; ++w) {
        const auto o = std::stoul(cells[1 + latent_cols + w]);
        if (o > max_outcome) throw std::out_of_range("outcome");
        data.set_outcome(r, w, static_cast<Outcome>(o));
      }
    } catch (const std::exception&) {
      throw Error("dataset '" + path.string() + "': malformed replicate row " + std::to_string(r));
    }
  }
  return data;
}

}  // namespace modalx
