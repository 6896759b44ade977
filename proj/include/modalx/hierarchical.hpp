#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modalx/valuation.hpp"

namespace modalx {

/// Law of the outcome at one world, either a full probability vector over
/// the 2^k outcomes or a product of per-atom Bernoulli parameters.
class DirectingMeasure {
 public:
  enum class Form { Full, BernoulliProduct };

  static DirectingMeasure full(std::vector<double> probabilities);
  static DirectingMeasure bernoulli(std::vector<double> theta);

  Form form() const noexcept { return form_; }
  std::size_t atoms() const noexcept { return atoms_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  double probability(Outcome o) const;
  std::vector<double> outcome_probabilities() const;
  /// Marginal probability that atom `atom` is true (Theta_l).
  double atom_probability(std::size_t atom) const;

  bool operator==(const DirectingMeasure&) const = default;

 private:
  Form form_ = Form::BernoulliProduct;
  std::size_t atoms_ = 0;
  std::vector<double> params_;
};

struct WeightedMeasure {
  double weight = 1.0;
  DirectingMeasure measure;
  bool operator==(const WeightedMeasure&) const = default;
};

/// Prior over the directing measure of one orbit.
struct OrbitPrior {
  enum class Kind { Point, Mixture, Beta, Dirichlet };

  Kind kind = Kind::Point;
  std::vector<WeightedMeasure> atoms;  // Point (one entry) and Mixture
  std::vector<double> beta_a, beta_b;  // per atom
  std::vector<double> dirichlet_alpha;  // per outcome

  static OrbitPrior point(DirectingMeasure m);
  static OrbitPrior mixture(std::vector<WeightedMeasure> atoms);
  static OrbitPrior beta(std::vector<double> a, std::vector<double> b);
  static OrbitPrior dirichlet(std::vector<double> alpha);

  /// Finitely supported (Point or Mixture).
  bool finite() const noexcept { return kind == Kind::Point || kind == Kind::Mixture; }
  /// Form of every draw: Beta draws are Bernoulli products, Dirichlet draws
  /// are full; a finite prior is full as soon as one atom is.
  DirectingMeasure::Form draw_form() const noexcept;

  bool operator==(const OrbitPrior&) const = default;
};

enum class Coupling { Independent, Shared, Joint };

std::string_view to_string(Coupling c) noexcept;

/// One atom of an explicitly listed joint prior: a weight and one directing
/// measure per orbit block.
struct JointAtom {
  double weight = 1.0;
  std::vector<DirectingMeasure> per_orbit;
  bool operator==(const JointAtom&) const = default;
};

struct HierarchicalSpec {
  AtomSet atoms;
  std::map<std::size_t, OrbitPrior> orbit_priors;
  std::optional<OrbitPrior> default_prior;  // `orbit *`
  DirectingMeasure designated_law;
  Coupling coupling = Coupling::Independent;
  std::vector<JointAtom> joint;

  /// Throws unless the spec is usable with a partition of `blocks` orbits.
  void validate(std::size_t blocks) const;

  const OrbitPrior& prior_for(std::size_t block) const;

  /// Form of the directing measure drawn for `block`.
  DirectingMeasure::Form latent_form(std::size_t block) const;

  bool operator==(const HierarchicalSpec&) const = default;
};

/// Key-value spec document:
///
///     atoms = p q
///     orbit 0: prior = mixture(0.5: bern(0.2), 0.5: bern(0.8))
///     orbit *: prior = beta(1, 1)
///     coupling = independent | shared | joint
///     joint 0.5: bern(0.2); bern(0.8)
///     designated = point(bern(0.5))
///
/// Directing measures are `bern(theta_1, ..., theta_k)` or
/// `full(p_0, ..., p_{2^k-1})`; a bare number list means `bern(...)`.
/// `beta(a, b)` applies to every atom, `beta(a1, b1; a2, b2)` per atom.
/// `dirichlet(c)` is symmetric, `dirichlet(c_0, ..., c_{2^k-1})` explicit.
HierarchicalSpec parse_spec(std::string_view text);
HierarchicalSpec load_spec(const std::filesystem::path& path);

/// Canonical text form; parse_spec(serialize_spec(s)) == s.
std::string serialize_spec(const HierarchicalSpec& spec);

}  // namespace modalx
