#include "modalx/sampler.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include "modalx/error.hpp"

namespace modalx {

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MODALX_THREADS")) {
    char* end = nullptr;
    const auto v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

LatentLayout latent_layout(const HierarchicalSpec& spec, const OrbitPartition& partition) {
  std::vector<DirectingMeasure::Form> forms;
  for (std::size_t b = 0; b < partition.size(); ++b) forms.push_back(spec.latent_form(b));
  return LatentLayout::for_forms(spec.atoms.size(), std::move(forms));
}

namespace {

std::vector<double> params_in_form(const DirectingMeasure& m, DirectingMeasure::Form form) {
  return form == DirectingMeasure::Form::Full ? m.outcome_probabilities() : m.parameters();
}

// A prior with its finite atoms pre-converted to the latent form.
struct PreparedPrior {
  const OrbitPrior* prior = nullptr;
  DirectingMeasure::Form form{};
  std::vector<double> weights_cum;
  std::vector<std::vector<double>> atom_params;

  PreparedPrior(const OrbitPrior& p, DirectingMeasure::Form f) : prior(&p), form(f) {
    if (!p.finite()) return;
    std::vector<double> w;
    for (const auto& a : p.atoms) {
      w.push_back(a.weight);
      atom_params.push_back(params_in_form(a.measure, f));
    }
    weights_cum = cumulative(w);
  }

  void draw(RandomStream& s, double* out) const {
    switch (prior->kind) {
      case OrbitPrior::Kind::Point:
      case OrbitPrior::Kind::Mixture: {
        const auto i = atom_params.size() == 1 ? 0 : s.categorical(weights_cum);
        std::copy(atom_params[i].begin(), atom_params[i].end(), out);
        return;
      }
      case OrbitPrior::Kind::Beta:
        for (std::size_t l = 0; l < prior->beta_a.size(); ++l) out[l] = s.beta(prior->beta_a[l], prior->beta_b[l]);
        return;
      case OrbitPrior::Kind::Dirichlet: {
        const auto d = s.dirichlet(prior->dirichlet_alpha);
        std::copy(d.begin(), d.end(), out);
        return;
      }
    }
  }
};

// Everything sample_replicates needs, prepared once.
class Plan {
 public:
  Plan(const HierarchicalSpec& spec, const OrbitPartition& partition)
      : spec_(spec), partition_(partition), layout_(latent_layout(spec, partition)) {
    spec.validate(partition.size());
    const std::size_t blocks = partition.size();
    if (spec.coupling == Coupling::Joint) {
      std::vector<double> w;
      for (const auto& atom : spec.joint) {
        w.push_back(atom.weight);
        std::vector<double> row;
        for (std::size_t b = 0; b < blocks; ++b) {
          auto p = params_in_form(atom.per_orbit[b], layout_.forms[b]);
          row.insert(row.end(), p.begin(), p.end());
        }
        joint_rows_.push_back(std::move(row));
      }
      joint_cum_ = cumulative(w);
    } else if (spec.coupling == Coupling::Shared) {
      if (blocks > 0) priors_.emplace_back(spec.prior_for(0), layout_.forms[0]);
    } else {
      for (std::size_t b = 0; b < blocks; ++b) priors_.emplace_back(spec.prior_for(b), layout_.forms[b]);
    }
    designated_bern_ = spec.designated_law.form() == DirectingMeasure::Form::BernoulliProduct;
    designated_params_ = designated_bern_ ? spec.designated_law.parameters()
                                          : cumulative(spec.designated_law.outcome_probabilities());
  }

  const LatentLayout& layout() const noexcept { return layout_; }

  void draw_latents(std::uint64_t seed, std::uint64_t r, double* row) const {
    const std::size_t blocks = partition_.size();
    switch (spec_.coupling) {
      case Coupling::Independent:
        for (std::size_t b = 0; b < blocks; ++b) {
          auto s = RandomStream::derive(seed, r, RandomStream::kLatent, b);
          priors_[b].draw(s, row + layout_.offsets[b]);
        }
        break;
      case Coupling::Shared:
        if (blocks > 0) {
          auto s = RandomStream::derive(seed, r, RandomStream::kLatent, 0);
          priors_[0].draw(s, row);
          for (std::size_t b = 1; b < blocks; ++b)
            std::copy(row, row + layout_.block_width(0), row + layout_.offsets[b]);
        }
        break;
      case Coupling::Joint: {
        auto s = RandomStream::derive(seed, r, RandomStream::kJoint, 0);
        const auto& chosen = joint_rows_[joint_rows_.size() == 1 ? 0 : s.categorical(joint_cum_)];
        std::copy(chosen.begin(), chosen.end(), row);
        break;
      }
    }
  }

  void sample(const double* row, RandomStream& s, std::uint16_t* out) const {
    const std::size_t k = layout_.atoms;
    const std::size_t blocks = partition_.size();
    thread_local std::vector<double> cdf;
    for (std::size_t b = 0; b < blocks; ++b) {
      const double* p = row + layout_.offsets[b];
      if (layout_.forms[b] == DirectingMeasure::Form::BernoulliProduct) {
        for (auto w : partition_.blocks[b]) out[w] = static_cast<std::uint16_t>(bernoulli_outcome(p, k, s));
      } else {
        cdf.assign(p, p + layout_.block_width(b));
        cdf = cumulative(cdf);
        for (auto w : partition_.blocks[b]) out[w] = static_cast<std::uint16_t>(s.categorical(cdf));
      }
    }
    for (std::size_t w = 0; w < partition_.block_of.size(); ++w) {
      if (partition_.block_of[w] != kNoBlock) continue;
      out[w] = static_cast<std::uint16_t>(designated_bern_ ? bernoulli_outcome(designated_params_.data(), k, s)
                                                           : s.categorical(designated_params_));
    }
  }

 private:
  static Outcome bernoulli_outcome(const double* theta, std::size_t k, RandomStream& s) {
    Outcome o = 0;
    for (std::size_t l = 0; l < k; ++l)
      if (s.uniform() < theta[l]) o |= Outcome{1} << l;
    return o;
  }

  const HierarchicalSpec& spec_;
  const OrbitPartition& partition_;
  LatentLayout layout_;
  std::vector<PreparedPrior> priors_;
  std::vector<std::vector<double>> joint_rows_;
  std::vector<double> joint_cum_;
  bool designated_bern_ = true;
  std::vector<double> designated_params_;
};

}  // namespace

std::vector<DirectingMeasure> draw_latents(const HierarchicalSpec& spec, const OrbitPartition& partition,
                                           std::uint64_t seed, std::uint64_t replicate) {
  Plan plan(spec, partition);
  const auto& layout = plan.layout();
  std::vector<double> row(layout.width);
  plan.draw_latents(seed, replicate, row.data());
  std::vector<DirectingMeasure> out;
  for (std::size_t b = 0; b < layout.blocks(); ++b) {
    std::vector<double> p(row.begin() + static_cast<std::ptrdiff_t>(layout.offsets[b]),
                          row.begin() + static_cast<std::ptrdiff_t>(layout.offsets[b] + layout.block_width(b)));
    if (layout.forms[b] == DirectingMeasure::Form::Full) {
      // Renormalize against rounding in the gamma ratios before validation.
      double sum = 0;
      for (auto x : p) sum += x;
      for (auto& x : p) x /= sum;
      out.push_back(DirectingMeasure::full(std::move(p)));
    } else {
      out.push_back(DirectingMeasure::bernoulli(std::move(p)));
    }
  }
  return out;
}

Valuation sample_valuation(const std::vector<DirectingMeasure>& latents, const OrbitPartition& partition,
                           const DirectingMeasure& designated, RandomStream& stream) {
  if (latents.size() != partition.size()) throw Error("need one directing measure per block");
  const std::size_t k = designated.atoms();
  HierarchicalSpec spec;
  std::vector<std::string> names;
  for (std::size_t l = 0; l < k; ++l) names.push_back("a" + std::to_string(l));
  spec.atoms = AtomSet(names);
  spec.designated_law = designated;
  spec.coupling = Coupling::Joint;
  spec.joint.push_back({1.0, latents});
  Plan plan(spec, partition);
  std::vector<double> row(plan.layout().width);
  plan.draw_latents(0, 0, row.data());
  std::vector<std::uint16_t> out(partition.block_of.size());
  plan.sample(row.data(), stream, out.data());
  return {out.begin(), out.end()};
}

Dataset sample_replicates(const HierarchicalSpec& spec, const OrbitPartition& partition, std::size_t n,
                          std::uint64_t seed, const SampleOptions& options) {
  if (n == 0) throw Error("replicate count must be at least 1");
  Plan plan(spec, partition);
  const std::size_t worlds = partition.block_of.size();
  Dataset data(worlds, spec.atoms.size(), n, plan.layout(), true);
  data.seed = seed;
  data.spec_fingerprint = fingerprint_hex(serialize_spec(spec));
  data.atom_names = spec.atoms.names();
  parallel_for(n, resolve_threads(options.threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto row = data.latents_of(r);
      plan.draw_latents(seed, r, row.data());
      auto s = RandomStream::derive(seed, r, RandomStream::kValues, 0);
      plan.sample(row.data(), s, data.outcomes_of(r).data());
    }
  });
  return data;
}

Dataset sample_from_measure(const ExactMeasure& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("replicate count must be at least 1");
  const auto& space = p.space();
  const auto cdf = cumulative(p.probabilities());
  Dataset data(space.worlds(), space.atoms(), n, LatentLayout{}, false);
  data.seed = seed;
  for (std::size_t r = 0; r < n; ++r) {
    auto s = RandomStream::derive(seed, r, RandomStream::kValues, 0);
    const auto v = s.categorical(cdf);
    for (std::size_t w = 0; w < space.worlds(); ++w) data.set_outcome(r, w, space.outcome_at(v, w));
  }
  return data;
}

}  // namespace modalx
