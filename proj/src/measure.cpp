#include "modalx/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "modalx/error.hpp"

namespace modalx {

void check_exact_size(std::size_t worlds, std::size_t atoms, const ExactOptions& options) {
  if (worlds > options.max_worlds)
    throw Error("frame has " + std::to_string(worlds) + " worlds; the exact path is capped at " +
                std::to_string(options.max_worlds));
  if (worlds * atoms > ValuationSpace::kMaxBits)
    throw Error("exact path needs k*|W| <= " + std::to_string(ValuationSpace::kMaxBits));
}

ExactMeasure::ExactMeasure(ValuationSpace space, std::vector<double> probabilities, double tolerance)
    : space_(space), probs_(std::move(probabilities)) {
  if (probs_.size() != space_.size())
    throw Error("measure has " + std::to_string(probs_.size()) + " entries, expected " +
                std::to_string(space_.size()));
  long double sum = 0;
  for (auto p : probs_) {
    if (!(p >= 0) || !std::isfinite(p)) throw Error("measure entries must be finite and >= 0");
    sum += p;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > tolerance)
    throw Error("measure sums to " + std::to_string(static_cast<double>(sum)) + ", expected 1");
}

ExactMeasure ExactMeasure::uniform(const ValuationSpace& space) {
  return ExactMeasure(space, std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())));
}

ExactMeasure ExactMeasure::point_mass(const ValuationSpace& space, std::uint64_t index) {
  if (index >= space.size()) throw Error("valuation index out of range");
  std::vector<double> probs(space.size(), 0.0);
  probs[index] = 1.0;
  return ExactMeasure(space, std::move(probs));
}

double ExactMeasure::distance_sup(const ExactMeasure& other) const {
  if (other.probs_.size() != probs_.size()) throw Error("measures live on different spaces");
  double d = 0;
  for (std::size_t i = 0; i < probs_.size(); ++i) d = std::max(d, std::abs(probs_[i] - other.probs_[i]));
  return d;
}

double ExactMeasure::total_variation(const ExactMeasure& other) const {
  if (other.probs_.size() != probs_.size()) throw Error("measures live on different spaces");
  long double d = 0;
  for (std::size_t i = 0; i < probs_.size(); ++i) d += std::abs(probs_[i] - other.probs_[i]);
  return static_cast<double>(d / 2);
}

namespace {

void check_degree(const ExactMeasure& p, std::size_t degree) {
  if (degree != p.space().worlds()) throw Error("permutation degree does not match the world count");
}

}  // namespace

ExactMeasure pushforward(const ExactMeasure& p, const Permutation& perm) {
  check_degree(p, perm.degree());
  const auto& space = p.space();
  std::vector<double> q(space.size());
  for (std::uint64_t v = 0; v < space.size(); ++v) q[space.act_index(perm, v)] = p[v];
  return ExactMeasure(space, std::move(q));
}

ExactMeasure symmetrize(const ExactMeasure& p, const PermGroup& group) {
  check_degree(p, group.degree());
  if (!group.enumerated()) throw Error("symmetrize needs an enumerated group");
  const auto& space = p.space();
  const auto& elements = group.elements();
  std::vector<long double> acc(space.size(), 0.0L);
  for (const auto& g : elements)
    for (std::uint64_t v = 0; v < space.size(); ++v) acc[space.act_index(g, v)] += p[v];
  const long double n = static_cast<long double>(elements.size());
  std::vector<double> q(space.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = static_cast<double>(acc[i] / n);
  return ExactMeasure(space, std::move(q));
}

InvarianceCheck check_invariance_exact(const ExactMeasure& p, const std::vector<Permutation>& generators,
                                       double tolerance) {
  InvarianceCheck out;
  const auto& space = p.space();
  for (const auto& g : generators) {
    check_degree(p, g.degree());
    for (std::uint64_t v = 0; v < space.size(); ++v)
      out.max_deviation = std::max(out.max_deviation, std::abs(p[v] - p[space.act_index(g, v)]));
  }
  out.invariant = out.max_deviation <= tolerance;
  return out;
}

InvarianceCheck check_invariance_exact(const ExactMeasure& p, const PermGroup& group, double tolerance) {
  check_degree(p, group.degree());
  return check_invariance_exact(p, group.generators(), tolerance);
}

ExactMeasure ErgodicDecomposition::reconstruct(const ValuationSpace& space) const {
  std::vector<double> probs(space.size(), 0.0);
  for (const auto& c : components) {
    const double each = c.weight / static_cast<double>(c.support.size());
    for (auto v : c.support) probs.at(v) += each;
  }
  return ExactMeasure(space, std::move(probs));
}

ErgodicDecomposition ergodic_decompose(const ExactMeasure& p, const PermGroup& group, double tolerance) {
  const auto check = check_invariance_exact(p, group, tolerance);
  if (!check.invariant) {
    std::ostringstream msg;
    msg << "measure is not invariant under the group (max deviation " << check.max_deviation << ")";
    throw Error(msg.str());
  }
  const auto& space = p.space();
  const auto& gens = group.generators();
  std::vector<bool> seen(space.size(), false);
  ErgodicDecomposition out;
  std::deque<std::uint64_t> queue;
  for (std::uint64_t start = 0; start < space.size(); ++start) {
    if (seen[start] || p[start] == 0.0) continue;
    ErgodicComponent comp;
    seen[start] = true;
    queue.push_back(start);
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      comp.support.push_back(v);
      for (const auto& g : gens) {
        const auto u = space.act_index(g, v);
        if (!seen[u]) {
          seen[u] = true;
          queue.push_back(u);
        }
      }
    }
    std::sort(comp.support.begin(), comp.support.end());
    long double mass = 0;
    for (auto v : comp.support) {
      if (std::abs(p[v] - p[start]) > tolerance) {
        std::ostringstream msg;
        msg << "unequal mass inside one orbit of valuations (" << p[start] << " vs " << p[v] << ")";
        throw Error(msg.str());
      }
      mass += p[v];
    }
    comp.weight = static_cast<double>(mass);
    out.components.push_back(std::move(comp));
  }
  return out;
}

namespace {

// Outcome probabilities per world given one choice of directing measure per
// block; worlds outside every block use the designated law.
double product_probability(const ValuationSpace& space, std::uint64_t v, const OrbitPartition& partition,
                           const std::vector<const std::vector<double>*>& per_block,
                           const std::vector<double>& designated) {
  double p = 1.0;
  for (std::size_t w = 0; w < space.worlds() && p != 0.0; ++w) {
    const auto o = space.outcome_at(v, w);
    const auto b = partition.block_of[w];
    p *= b == kNoBlock ? designated[o] : (*per_block[b])[o];
  }
  return p;
}

}  // namespace

ExactMeasure exact_hier_measure(const HierarchicalSpec& spec, const OrbitPartition& partition,
                                const ExactOptions& options) {
  const std::size_t worlds = partition.block_of.size();
  const std::size_t k = spec.atoms.size();
  check_exact_size(worlds, k, options);
  spec.validate(partition.size());
  const ValuationSpace space(worlds, k);
  const auto designated = spec.designated_law.outcome_probabilities();
  const std::size_t blocks = partition.size();

  // Each joint atom lists one outcome vector per block.
  struct Atom {
    double weight;
    std::vector<std::vector<double>> per_block;
  };
  std::vector<Atom> atoms;
  auto finite_prior = [&](std::size_t block) -> const OrbitPrior& {
    const auto& prior = spec.prior_for(block);
    if (!prior.finite())
      throw Error("exact measure needs finitely supported priors (orbit " + std::to_string(block) + ")");
    return prior;
  };

  std::vector<double> probs(space.size(), 0.0);
  switch (spec.coupling) {
    case Coupling::Independent: {
      // Mixture over the product of per-block atoms factorizes per block.
      std::vector<std::vector<std::pair<double, std::vector<double>>>> mix(blocks);
      for (std::size_t b = 0; b < blocks; ++b)
        for (const auto& a : finite_prior(b).atoms) mix[b].emplace_back(a.weight, a.measure.outcome_probabilities());
      for (std::uint64_t v = 0; v < space.size(); ++v) {
        double p = 1.0;
        for (std::size_t w = 0; w < worlds; ++w)
          if (partition.block_of[w] == kNoBlock) p *= designated[space.outcome_at(v, w)];
        for (std::size_t b = 0; b < blocks && p != 0.0; ++b) {
          double term = 0.0;
          for (const auto& [weight, law] : mix[b]) {
            double q = weight;
            for (auto w : partition.blocks[b]) q *= law[space.outcome_at(v, w)];
            term += q;
          }
          p *= term;
        }
        probs[v] = p;
      }
      return ExactMeasure(space, std::move(probs), options.tolerance * 1e3);
    }
    case Coupling::Shared:
      if (blocks > 0)
        for (const auto& a : finite_prior(0).atoms)
          atoms.push_back({a.weight, std::vector<std::vector<double>>(blocks, a.measure.outcome_probabilities())});
      break;
    case Coupling::Joint:
      for (const auto& j : spec.joint) {
        Atom a{j.weight, {}};
        for (const auto& m : j.per_orbit) a.per_block.push_back(m.outcome_probabilities());
        atoms.push_back(std::move(a));
      }
      break;
  }
  if (atoms.empty()) atoms.push_back({1.0, {}});

  std::vector<const std::vector<double>*> per_block(blocks);
  for (const auto& atom : atoms) {
    for (std::size_t b = 0; b < blocks; ++b) per_block[b] = &atom.per_block[b];
    for (std::uint64_t v = 0; v < space.size(); ++v)
      probs[v] += atom.weight * product_probability(space, v, partition, per_block, designated);
  }
  return ExactMeasure(space, std::move(probs), options.tolerance * 1e3);
}

std::vector<double> marginal(const ExactMeasure& p, std::size_t world) {
  return joint_marginal(p, {world});
}

std::vector<double> joint_marginal(const ExactMeasure& p, const std::vector<std::size_t>& worlds) {
  const auto& space = p.space();
  for (auto w : worlds)
    if (w >= space.worlds()) throw Error("world index " + std::to_string(w) + " out of range");
  const std::size_t k = space.atoms();
  std::vector<long double> acc(std::size_t{1} << (k * worlds.size()), 0.0L);
  for (std::uint64_t v = 0; v < space.size(); ++v) {
    std::size_t o = 0;
    for (std::size_t i = 0; i < worlds.size(); ++i)
      o |= static_cast<std::size_t>(space.outcome_at(v, worlds[i])) << (k * i);
    acc[o] += p[v];
  }
  return {acc.begin(), acc.end()};
}

ExactMeasure read_measure_csv(const std::filesystem::path& path, const ValuationSpace& space,
                              double tolerance) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open measure file '" + path.string() + "'");
  std::vector<double> probs(space.size(), 0.0);
  std::vector<bool> given(space.size(), false);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "valuation_index,probability")
        throw ParseError(line_no, "expected header 'valuation_index,probability'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected 'index,probability'");
    std::uint64_t idx = 0;
    double prob = 0;
    try {
      std::size_t used = 0;
      idx = std::stoull(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("index");
      const auto rest = line.substr(comma + 1);
      prob = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("probability");
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed row '" + line + "'");
    }
    if (idx >= space.size())
      throw ParseError(line_no, "valuation index " + std::to_string(idx) + " outside 2^(k|W|) = " +
                                    std::to_string(space.size()));
    if (given[idx]) throw ParseError(line_no, "duplicate valuation index " + std::to_string(idx));
    given[idx] = true;
    probs[idx] = prob;
  }
  if (!header) throw Error("measure file '" + path.string() + "' is empty");
  return ExactMeasure(space, std::move(probs), tolerance);
}

std::string measure_csv(const ExactMeasure& p) {
  std::string out = "valuation_index,probability\n";
  char buf[64];
  for (std::uint64_t v = 0; v < p.space().size(); ++v) {
    if (p[v] == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%llu,%.17g\n", static_cast<unsigned long long>(v), p[v]);
    out += buf;
  }
  return out;
}

}  // namespace modalx
