#include "modalx/hierarchical.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "modalx/error.hpp"

namespace modalx {

namespace {

constexpr double kMeasureTolerance = 1e-12;
constexpr double kWeightTolerance = 1e-9;

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string join_numbers(const std::vector<double>& xs, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_number(xs[i]);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void check_weights(const std::vector<double>& w, const char* what) {
  double sum = 0;
  for (auto x : w) {
    if (!(x >= 0) || !std::isfinite(x)) throw Error(std::string(what) + " weights must be finite and >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kWeightTolerance)
    throw Error(std::string(what) + " weights sum to " + format_number(sum) + ", expected 1");
}

// Recursive-descent reader for measure and prior terms on one line.
class TermParser {
 public:
  TermParser(std::string_view text, std::size_t line, std::size_t atoms)
      : s_(text), line_(line), atoms_(atoms) {}

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  void expect_end() {
    if (!at_end()) fail("unexpected trailing text '" + std::string(s_.substr(pos_)) + "'");
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  std::string ident() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  bool peek_number() {
    skip_ws();
    return pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' || s_[pos_] == '-' ||
            s_[pos_] == '+');
  }

  double number() {
    skip_ws();
    double value = 0;
    auto begin = s_.data() + pos_;
    if (*begin == '+') ++begin;
    auto res = std::from_chars(begin, s_.data() + s_.size(), value);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return value;
  }

  std::vector<double> number_list(char separator) {
    std::vector<double> xs{number()};
    while (eat(separator)) xs.push_back(number());
    return xs;
  }

  DirectingMeasure measure() {
    if (peek_number()) return make_bernoulli(number_list(','));
    const auto name = ident();
    expect('(');
    auto xs = number_list(',');
    expect(')');
    if (name == "bern") return make_bernoulli(std::move(xs));
    if (name == "full") return make_full(std::move(xs));
    fail("unknown directing measure '" + name + "'");
  }

  // Inside a mixture a bare number is only unambiguous for a single atom.
  DirectingMeasure mixture_component() {
    if (peek_number()) {
      if (atoms_ != 1) fail("use bern(...) or full(...) for mixture components when k > 1");
      return make_bernoulli({number()});
    }
    return measure();
  }

  OrbitPrior prior() {
    const auto name = ident();
    expect('(');
    OrbitPrior p;
    if (name == "point") {
      p = OrbitPrior::point(measure());
    } else if (name == "mixture") {
      std::vector<WeightedMeasure> atoms;
      do {
        const double w = number();
        expect(':');
        atoms.push_back({w, mixture_component()});
      } while (eat(','));
      p = wrap([&] { return OrbitPrior::mixture(std::move(atoms)); });
    } else if (name == "beta") {
      std::vector<double> a, b;
      do {
        a.push_back(number());
        expect(',');
        b.push_back(number());
      } while (eat(';'));
      if (a.size() == 1 && atoms_ > 1) {
        a.assign(atoms_, a[0]);
        b.assign(atoms_, b[0]);
      }
      if (a.size() != atoms_) fail("beta prior needs one (a, b) pair or one per atom");
      p = wrap([&] { return OrbitPrior::beta(std::move(a), std::move(b)); });
    } else if (name == "dirichlet") {
      auto alpha = number_list(',');
      const std::size_t outcomes = std::size_t{1} << atoms_;
      if (alpha.size() == 1) alpha.assign(outcomes, alpha[0]);
      if (alpha.size() != outcomes) fail("dirichlet prior needs 1 or 2^k concentration values");
      p = wrap([&] { return OrbitPrior::dirichlet(std::move(alpha)); });
    } else {
      fail("unknown prior '" + name + "'");
    }
    expect(')');
    return p;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, message); }

  template <class F>
  auto wrap(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  DirectingMeasure make_bernoulli(std::vector<double> xs) {
    if (xs.size() != atoms_)
      fail("bern(...) needs " + std::to_string(atoms_) + " parameter(s), got " + std::to_string(xs.size()));
    return wrap([&] { return DirectingMeasure::bernoulli(std::move(xs)); });
  }

  DirectingMeasure make_full(std::vector<double> xs) {
    if (xs.size() != (std::size_t{1} << atoms_))
      fail("full(...) needs 2^k = " + std::to_string(std::size_t{1} << atoms_) + " probabilities");
    return wrap([&] { return DirectingMeasure::full(std::move(xs)); });
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t atoms_;
};

std::string measure_text(const DirectingMeasure& m) {
  return (m.form() == DirectingMeasure::Form::Full ? "full(" : "bern(") + join_numbers(m.parameters()) + ")";
}

std::string prior_text(const OrbitPrior& p) {
  switch (p.kind) {
    case OrbitPrior::Kind::Point:
      return "point(" + measure_text(p.atoms.front().measure) + ")";
    case OrbitPrior::Kind::Mixture: {
      std::string out = "mixture(";
      for (std::size_t i = 0; i < p.atoms.size(); ++i) {
        if (i) out += ", ";
        out += format_number(p.atoms[i].weight) + ": " + measure_text(p.atoms[i].measure);
      }
      return out + ")";
    }
    case OrbitPrior::Kind::Beta: {
      std::string out = "beta(";
      for (std::size_t i = 0; i < p.beta_a.size(); ++i) {
        if (i) out += "; ";
        out += format_number(p.beta_a[i]) + ", " + format_number(p.beta_b[i]);
      }
      return out + ")";
    }
    case OrbitPrior::Kind::Dirichlet:
      return "dirichlet(" + join_numbers(p.dirichlet_alpha) + ")";
  }
  return {};
}

}  // namespace

DirectingMeasure DirectingMeasure::full(std::vector<double> probabilities) {
  const auto n = probabilities.size();
  if (n < 2 || (n & (n - 1)) != 0) throw Error("full directing measure needs 2^k entries");
  double sum = 0;
  for (auto p : probabilities) {
    if (!(p >= 0) || !std::isfinite(p)) throw Error("directing measure entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMeasureTolerance)
    throw Error("directing measure sums to " + format_number(sum) + ", expected 1");
  DirectingMeasure m;
  m.form_ = Form::Full;
  m.atoms_ = static_cast<std::size_t>(std::countr_zero(n));
  m.params_ = std::move(probabilities);
  return m;
}

DirectingMeasure DirectingMeasure::bernoulli(std::vector<double> theta) {
  if (theta.empty()) throw Error("Bernoulli directing measure needs at least one atom");
  for (auto t : theta)
    if (!(t >= 0.0 && t <= 1.0)) throw Error("Bernoulli parameter outside [0, 1]");
  DirectingMeasure m;
  m.form_ = Form::BernoulliProduct;
  m.atoms_ = theta.size();
  m.params_ = std::move(theta);
  return m;
}

double DirectingMeasure::probability(Outcome o) const {
  if (form_ == Form::Full) return params_.at(o);
  double p = 1.0;
  for (std::size_t l = 0; l < atoms_; ++l) p *= ((o >> l) & 1u) ? params_[l] : 1.0 - params_[l];
  return p;
}

std::vector<double> DirectingMeasure::outcome_probabilities() const {
  if (form_ == Form::Full) return params_;
  std::vector<double> out(std::size_t{1} << atoms_);
  for (Outcome o = 0; o < out.size(); ++o) out[o] = probability(o);
  return out;
}

double DirectingMeasure::atom_probability(std::size_t atom) const {
  if (atom >= atoms_) throw Error("atom index out of range");
  if (form_ == Form::BernoulliProduct) return params_[atom];
  double p = 0;
  for (Outcome o = 0; o < params_.size(); ++o)
    if ((o >> atom) & 1u) p += params_[o];
  return p;
}

OrbitPrior OrbitPrior::point(DirectingMeasure m) {
  OrbitPrior p;
  p.kind = Kind::Point;
  p.atoms.push_back({1.0, std::move(m)});
  return p;
}

OrbitPrior OrbitPrior::mixture(std::vector<WeightedMeasure> atoms) {
  if (atoms.empty()) throw Error("mixture prior needs at least one component");
  std::vector<double> w;
  for (const auto& a : atoms) {
    w.push_back(a.weight);
    if (a.measure.atoms() != atoms.front().measure.atoms())
      throw Error("mixture components disagree on atom count");
  }
  check_weights(w, "mixture");
  OrbitPrior p;
  p.kind = Kind::Mixture;
  p.atoms = std::move(atoms);
  return p;
}

OrbitPrior OrbitPrior::beta(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || a.size() != b.size()) throw Error("beta prior needs matching shape vectors");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] > 0) || !(b[i] > 0) || !std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw Error("beta shape parameters must be > 0");
  OrbitPrior p;
  p.kind = Kind::Beta;
  p.beta_a = std::move(a);
  p.beta_b = std::move(b);
  return p;
}

OrbitPrior OrbitPrior::dirichlet(std::vector<double> alpha) {
  const auto n = alpha.size();
  if (n < 2 || (n & (n - 1)) != 0) throw Error("dirichlet prior needs 2^k concentrations");
  for (auto x : alpha)
    if (!(x > 0) || !std::isfinite(x)) throw Error("dirichlet concentrations must be > 0");
  OrbitPrior p;
  p.kind = Kind::Dirichlet;
  p.dirichlet_alpha = std::move(alpha);
  return p;
}

DirectingMeasure::Form OrbitPrior::draw_form() const noexcept {
  switch (kind) {
    case Kind::Beta:
      return DirectingMeasure::Form::BernoulliProduct;
    case Kind::Dirichlet:
      return DirectingMeasure::Form::Full;
    default:
      break;
  }
  for (const auto& a : atoms)
    if (a.measure.form() == DirectingMeasure::Form::Full) return DirectingMeasure::Form::Full;
  return DirectingMeasure::Form::BernoulliProduct;
}

std::string_view to_string(Coupling c) noexcept {
  switch (c) {
    case Coupling::Shared:
      return "shared";
    case Coupling::Joint:
      return "joint";
    case Coupling::Independent:
      break;
  }
  return "independent";
}

const OrbitPrior& HierarchicalSpec::prior_for(std::size_t block) const {
  if (auto it = orbit_priors.find(block); it != orbit_priors.end()) return it->second;
  if (default_prior) return *default_prior;
  throw Error("no prior for orbit " + std::to_string(block));
}

DirectingMeasure::Form HierarchicalSpec::latent_form(std::size_t block) const {
  if (coupling == Coupling::Joint) {
    for (const auto& atom : joint)
      if (atom.per_orbit.at(block).form() == DirectingMeasure::Form::Full)
        return DirectingMeasure::Form::Full;
    return DirectingMeasure::Form::BernoulliProduct;
  }
  return prior_for(coupling == Coupling::Shared ? 0 : block).draw_form();
}

void HierarchicalSpec::validate(std::size_t blocks) const {
  const auto k = atoms.size();
  if (k == 0) throw Error("spec declares no atoms");
  if (designated_law.atoms() != k) throw Error("designated law does not match the atom count");
  auto check_measure = [&](const DirectingMeasure& m) {
    if (m.atoms() != k) throw Error("directing measure does not match the atom count");
  };
  auto check_prior = [&](const OrbitPrior& p) {
    for (const auto& a : p.atoms) check_measure(a.measure);
    if (p.kind == OrbitPrior::Kind::Beta && p.beta_a.size() != k)
      throw Error("beta prior does not match the atom count");
    if (p.kind == OrbitPrior::Kind::Dirichlet && p.dirichlet_alpha.size() != (std::size_t{1} << k))
      throw Error("dirichlet prior does not match the outcome count");
  };
  for (const auto& [block, prior] : orbit_priors) {
    if (block >= blocks)
      throw Error("prior given for orbit " + std::to_string(block) + " but the partition has " +
                  std::to_string(blocks) + " orbit(s)");
    check_prior(prior);
  }
  if (default_prior) check_prior(*default_prior);

  switch (coupling) {
    case Coupling::Independent:
      for (std::size_t b = 0; b < blocks; ++b) prior_for(b);
      break;
    case Coupling::Shared:
      for (std::size_t b = 0; b < blocks; ++b)
        if (!(prior_for(b) == prior_for(0)))
          throw Error("shared coupling requires the same prior on every orbit");
      break;
    case Coupling::Joint: {
      if (joint.empty()) throw Error("joint coupling needs at least one 'joint' line");
      std::vector<double> w;
      for (const auto& atom : joint) {
        if (atom.per_orbit.size() != blocks)
          throw Error("joint atom lists " + std::to_string(atom.per_orbit.size()) +
                      " measures for " + std::to_string(blocks) + " orbit(s)");
        for (const auto& m : atom.per_orbit) check_measure(m);
        w.push_back(atom.weight);
      }
      check_weights(w, "joint");
      break;
    }
  }
}

HierarchicalSpec parse_spec(std::string_view text) {
  HierarchicalSpec spec;
  bool have_atoms = false, have_designated = false, have_coupling = false;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    auto need_atoms = [&] {
      if (!have_atoms) throw ParseError(line_no, "'atoms' must be declared before measures");
    };

    if (line.rfind("orbit", 0) == 0) {
      need_atoms();
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "expected 'orbit <index>: prior = ...'");
      const auto target = trim(std::string_view(line).substr(5, colon - 5));
      auto rest = trim(std::string_view(line).substr(colon + 1));
      if (rest.rfind("prior", 0) != 0) throw ParseError(line_no, "expected 'prior = ...'");
      rest = trim(std::string_view(rest).substr(5));
      if (rest.empty() || rest[0] != '=') throw ParseError(line_no, "expected '=' after 'prior'");
      TermParser tp(std::string_view(rest).substr(1), line_no, spec.atoms.size());
      auto prior = tp.prior();
      tp.expect_end();
      if (target == "*") {
        if (spec.default_prior) throw ParseError(line_no, "duplicate 'orbit *' prior");
        spec.default_prior = std::move(prior);
      } else {
        std::size_t block = 0;
        auto res = std::from_chars(target.data(), target.data() + target.size(), block);
        if (res.ec != std::errc() || res.ptr != target.data() + target.size())
          throw ParseError(line_no, "orbit index must be a non-negative integer or '*'");
        if (!spec.orbit_priors.emplace(block, std::move(prior)).second)
          throw ParseError(line_no, "duplicate prior for orbit " + target);
      }
      continue;
    }

    if (line.rfind("joint", 0) == 0) {
      need_atoms();
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "expected 'joint <weight>: m0; m1; ...'");
      JointAtom atom;
      TermParser wp(std::string_view(line).substr(5, colon - 5), line_no, spec.atoms.size());
      atom.weight = wp.number();
      wp.expect_end();
      TermParser tp(std::string_view(line).substr(colon + 1), line_no, spec.atoms.size());
      do {
        atom.per_orbit.push_back(tp.measure());
      } while (tp.eat(';'));
      tp.expect_end();
      spec.joint.push_back(std::move(atom));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key == "atoms") {
      if (have_atoms) throw ParseError(line_no, "duplicate 'atoms'");
      std::vector<std::string> names;
      std::string cleaned = value;
      for (auto& c : cleaned)
        if (c == ',') c = ' ';
      std::istringstream in(cleaned);
      for (std::string n; in >> n;) names.push_back(n);
      try {
        spec.atoms = AtomSet(std::move(names));
      } catch (const Error& e) {
        throw ParseError(line_no, e.what());
      }
      have_atoms = true;
    } else if (key == "coupling") {
      if (have_coupling) throw ParseError(line_no, "duplicate 'coupling'");
      have_coupling = true;
      if (value == "independent")
        spec.coupling = Coupling::Independent;
      else if (value == "shared")
        spec.coupling = Coupling::Shared;
      else if (value == "joint")
        spec.coupling = Coupling::Joint;
      else
        throw ParseError(line_no, "coupling must be independent, shared or joint");
    } else if (key == "designated") {
      need_atoms();
      if (have_designated) throw ParseError(line_no, "duplicate 'designated'");
      TermParser tp(value, line_no, spec.atoms.size());
      if (value.rfind("point", 0) == 0) {
        auto prior = tp.prior();
        spec.designated_law = prior.atoms.front().measure;
      } else {
        spec.designated_law = tp.measure();
      }
      tp.expect_end();
      have_designated = true;
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_atoms) throw ParseError(line_no, "missing 'atoms'");
  if (!have_designated) throw ParseError(line_no, "missing 'designated' law");
  return spec;
}

HierarchicalSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open spec file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_spec(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string serialize_spec(const HierarchicalSpec& spec) {
  std::string out = "atoms =";
  for (const auto& n : spec.atoms.names()) out += " " + n;
  out += "\ncoupling = " + std::string(to_string(spec.coupling)) + "\n";
  out += "designated = point(" + measure_text(spec.designated_law) + ")\n";
  if (spec.default_prior) out += "orbit *: prior = " + prior_text(*spec.default_prior) + "\n";
  for (const auto& [block, prior] : spec.orbit_priors)
    out += "orbit " + std::to_string(block) + ": prior = " + prior_text(prior) + "\n";
  for (const auto& atom : spec.joint) {
    out += "joint " + format_number(atom.weight) + ":";
    for (std::size_t i = 0; i < atom.per_orbit.size(); ++i)
      out += (i ? "; " : " ") + measure_text(atom.per_orbit[i]);
    out += "\n";
  }
  return out;
}

}  // namespace modalx
