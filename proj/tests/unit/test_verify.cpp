#include <doctest.h>

#include <cmath>
#include <random>

#include "adversaries.hpp"
#include "modalx/error.hpp"
#include "modalx/measure.hpp"
#include "modalx/sampler.hpp"
#include "modalx/verify.hpp"
#include "oracles.hpp"

using namespace modalx;

namespace {

Frame data_frame(const char* name) { return load_frame(std::string(MODALX_DATA_DIR) + "/" + name); }

OrbitPartition make_partition(std::size_t worlds, std::vector<WorldSet> blocks) {
  OrbitPartition p;
  p.blocks = std::move(blocks);
  p.block_of.assign(worlds, kNoBlock);
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (auto w : p.blocks[b]) p.block_of[w] = b;
  return p;
}

WorldSet range(WorldIndex first, WorldIndex last) {
  WorldSet s;
  for (auto w = first; w <= last; ++w) s.push_back(w);
  return s;
}

// Frame {w0} + orbit A (3 worlds) + orbit B (2 worlds), with its stabilizer.
struct Example2 {
  Frame frame = data_frame("example2.frame");
  PermGroup group = stabilizer(frame);
  OrbitPartition partition = cluster_orbits(frame, group);
};

}  // namespace

TEST_CASE("chi-square tail") {
  CHECK(chi_square_sf(0.0, 3) == 1.0);
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(std::numeric_limits<double>::infinity(), 2) == 0.0);
}

TEST_CASE("rigidity: sampler data passes, world-dependent data fails") {
  Example2 ex;
  auto spec = parse_spec("atoms = p\norbit 0: prior = beta(2, 2)\norbit 1: prior = mixture(0.5: 0.2, 0.5: 0.8)\n"
                         "designated = 0.5\n");
  auto data = sample_replicates(spec, ex.partition, 20000, 1);
  auto rep = test_rigidity(data, ex.partition);
  CHECK(rep.pass);
  REQUIRE(rep.components.size() == 2);
  CHECK(rep.threshold == doctest::Approx(0.005));
  CHECK(rep.components[0].df == 2);

  auto bad = adversary::world_dependent(6, {{1, 0.2}, {2, 0.8}}, 10000, 3);
  auto fail = test_rigidity(bad, ex.partition);
  CHECK_FALSE(fail.pass);
  CHECK(fail.p_value < 1e-10);

  auto singletons = make_partition(3, {{1}, {2}});
  auto vac = test_rigidity(adversary::world_dependent(3, {{1, 0.1}}, 100, 1), singletons);
  CHECK(vac.pass);
  CHECK(vac.components.empty());
  CHECK_FALSE(vac.notes.empty());
  CHECK_THROWS_AS(test_rigidity(Dataset(3, 1, 0, {}, false), singletons), Error);
}

TEST_CASE("exchangeability: sampler data passes, Markov data fails") {
  const auto part = make_partition(41, {range(1, 40)});
  auto spec = parse_spec("atoms = p\norbit 0: prior = beta(1, 1)\ndesignated = 0.5\n");
  auto data = sample_replicates(spec, part, 20000, 5);
  for (std::size_t m : {1, 2, 3}) {
    CAPTURE(m);
    CHECK(test_exchangeability(data, part.blocks[0], m, {.seed = 9}).pass);
  }
  auto markov = adversary::markov_chain(41, part.blocks[0], 0.9, 20000, 11);
  auto fail = test_exchangeability(markov, part.blocks[0], 2, {.seed = 9});
  CHECK_FALSE(fail.pass);
  // Rigidity alone cannot see it: every world is a fair coin.
  CHECK(test_rigidity(markov, part, {.seed = 9}).pass);

  // m = 1 compares single worlds, the rigidity comparison.
  const auto small = make_partition(5, {range(1, 4)});
  auto d = sample_replicates(spec, small, 5000, 2);
  auto e1 = test_exchangeability(d, small.blocks[0], 1);
  auto r1 = test_rigidity(d, small);
  CHECK(e1.statistic == doctest::Approx(r1.statistic).epsilon(1e-12));
  CHECK_THROWS_AS(test_exchangeability(d, {1, 2}, 3), Error);
}

TEST_CASE("invariance: sampler and symmetrized data pass, constant data fails") {
  Example2 ex;
  auto spec = parse_spec("atoms = p q\norbit *: prior = dirichlet(2)\ndesignated = 0.5, 0.5\n");
  auto data = sample_replicates(spec, ex.partition, 20000, 7);
  auto rep = test_invariance_mc(data, ex.group.generators());
  CHECK(rep.pass);
  CHECK(rep.components.size() == ex.group.generators().size());

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  const ValuationSpace space(6, 1);
  std::vector<double> probs(space.size());
  double sum = 0;
  for (auto& p : probs) sum += p = u(rng);
  for (auto& p : probs) p /= sum;
  auto sym = symmetrize(ExactMeasure(space, probs, 1e-9), ex.group);
  CHECK(test_invariance_mc(sample_from_measure(sym, 20000, 3), ex.group.generators()).pass);

  auto constant = adversary::constant({0, 1, 0, 0, 1, 0}, 1, 1000);
  auto fail = test_invariance_mc(constant, ex.group.generators());
  CHECK_FALSE(fail.pass);
  CHECK(std::isinf(fail.statistic));
}

TEST_CASE("randomization fallback for sparse categories") {
  const auto part = make_partition(5, {range(1, 4)});
  auto spec = parse_spec("atoms = p\norbit 0: prior = beta(1, 1)\ndesignated = 0.5\n");
  auto data = sample_replicates(spec, part, 6, 3);
  auto rep = test_rigidity(data, part, {.seed = 4, .resamples = 2000});
  REQUIRE(rep.components.size() == 1);
  CHECK(rep.components[0].method.rfind("randomization", 0) == 0);
  CHECK(rep.p_value > 0.0);
  CHECK(rep.p_value <= 1.0);
  // Replays bit-identically from the seed.
  auto again = test_rigidity(data, part, {.seed = 4, .resamples = 2000});
  CHECK(again.p_value == rep.p_value);

  auto bad = adversary::world_dependent(5, {{1, 0.0}, {2, 1.0}, {3, 0.0}, {4, 1.0}}, 8, 1);
  CHECK_FALSE(test_rigidity(bad, part, {.seed = 4, .resamples = 2000}).pass);
}

TEST_CASE("calibration: tests under their own null pass at rate >= 1 - 2 alpha") {
  Example2 ex;
  auto spec = parse_spec("atoms = p\norbit 0: prior = beta(2, 3)\norbit 1: prior = beta(1, 1)\n"
                         "designated = 0.5\n");
  int rig = 0, exch = 0, inv = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    auto data = sample_replicates(spec, ex.partition, 2000, 1000 + rep);
    TestOptions opt{.seed = rep};
    rig += test_rigidity(data, ex.partition, opt).pass;
    exch += test_exchangeability(data, ex.partition.blocks[0], 2, opt).pass;
    inv += test_invariance_mc(data, ex.group.generators(), {}, opt).pass;
  }
  CHECK(rig >= 98);
  CHECK(exch >= 98);
  CHECK(inv >= 98);
}

TEST_CASE("statistical verdicts agree with exact checks on tiny frames") {
  Example2 ex;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    ExactMeasure p = ExactMeasure::uniform(ValuationSpace(6, 1));
    if (trial % 2 == 0) {
      auto spec = parse_spec("atoms = p\ndesignated = 0.5\n");
      spec.orbit_priors.emplace(0, OrbitPrior::mixture({{0.5, DirectingMeasure::bernoulli({u(rng)})},
                                                        {0.5, DirectingMeasure::bernoulli({u(rng)})}}));
      spec.orbit_priors.emplace(1, OrbitPrior::point(DirectingMeasure::bernoulli({u(rng)})));
      p = exact_hier_measure(spec, ex.partition);
    } else {
      // A per-world product law with well separated parameters inside orbit 0.
      std::vector<double> theta{0.5, 0.15 + 0.1 * u(rng), 0.5, 0.75 + 0.1 * u(rng), u(rng), u(rng)};
      std::vector<double> probs(64);
      for (std::uint64_t v = 0; v < 64; ++v) {
        probs[v] = 1.0;
        for (std::size_t w = 0; w < 6; ++w) probs[v] *= ((v >> w) & 1u) ? theta[w] : 1 - theta[w];
      }
      p = ExactMeasure(ValuationSpace(6, 1), probs, 1e-9);
    }
    bool exact_rigid = true;
    for (const auto& block : ex.partition.blocks)
      for (auto w : block)
        for (std::size_t o = 0; o < 2; ++o)
          exact_rigid &= std::abs(marginal(p, w)[o] - marginal(p, block[0])[o]) <= 1e-12;
    bool exact_exch = true;
    const auto& a = ex.partition.blocks[0];
    const auto ref = joint_marginal(p, {a[0], a[1]});
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        if (i != j) {
          const auto jm = joint_marginal(p, {a[i], a[j]});
          for (std::size_t o = 0; o < jm.size(); ++o) exact_exch &= std::abs(jm[o] - ref[o]) <= 1e-12;
        }
    auto data = sample_from_measure(p, 20000, 500 + static_cast<std::uint64_t>(trial));
    TestOptions opt{.seed = static_cast<std::uint64_t>(trial)};
    CHECK(test_rigidity(data, ex.partition, opt).pass == exact_rigid);
    CHECK(test_exchangeability(data, a, 2, opt).pass == exact_exch);
    CHECK(exact_rigid == (trial % 2 == 0));
  }
}

TEST_CASE("estimate_directing") {
  const auto part = make_partition(201, {range(1, 200)});
  auto fair = parse_spec("atoms = p\norbit 0: prior = point(0.5)\ndesignated = 0.5\n");
  auto est = estimate_directing(sample_replicates(fair, part, 10000, 3), part.blocks[0], 0);
  CHECK(std::abs(est.mean - 0.5) <= 0.002);
  REQUIRE(est.modes.size() == 1);

  auto mix = parse_spec("atoms = p\norbit 0: prior = mixture(0.5: 0.2, 0.5: 0.8)\ndesignated = 0.5\n");
  auto m = estimate_directing(sample_replicates(mix, part, 10000, 4), part.blocks[0], 0);
  REQUIRE(m.modes.size() == 2);
  CHECK(std::abs(m.modes[0].location - 0.2) <= 0.03);
  CHECK(std::abs(m.modes[1].location - 0.8) <= 0.03);
  CHECK(std::abs(m.modes[0].mass - 0.5) <= 0.02);
  CHECK(std::abs(m.modes[1].mass - 0.5) <= 0.02);

  auto one = make_partition(2, {{1}});
  auto raw = estimate_directing(sample_replicates(fair, one, 100, 1), {1}, 0, 2);
  for (double f : raw.frequencies) CHECK((f == 0.0 || f == 1.0));
  CHECK(raw.histogram[0] + raw.histogram[1] == 100);
}

TEST_CASE("principal principle calibration") {
  const auto part = make_partition(201, {range(1, 200)});
  auto fixed = parse_spec("atoms = p\norbit 0: prior = point(0.2)\ndesignated = 0.5\n");
  std::vector<CalibrationBin> bins;
  auto rep = test_principal_principle(sample_replicates(fixed, part, 6000, 1), part, 0, {}, &bins);
  CHECK(rep.pass);
  CHECK(bins[2].evaluated);
  CHECK(std::abs(bins[2].frequency - 0.2) <= 0.01);

  auto zero = parse_spec("atoms = p\norbit 0: prior = point(0)\ndesignated = 0.5\n");
  test_principal_principle(sample_replicates(zero, part, 100, 1), part, 0, {.min_observations = 1}, &bins);
  CHECK(bins[0].frequency == 0.0);

  auto uniform = parse_spec("atoms = p\norbit 0: prior = beta(1, 1)\ndesignated = 0.5\n");
  auto cal = test_principal_principle(sample_replicates(uniform, part, 20000, 2), part, 0,
                                      {.min_observations = 100000}, &bins);
  CHECK(cal.pass);
  CHECK(cal.deviation <= 0.02);
  for (const auto& b : bins) CHECK(b.evaluated);

  Dataset no_latents(3, 1, 10, {}, false);
  CHECK_THROWS_AS(test_principal_principle(no_latents, make_partition(3, {{1, 2}}), 0), Error);
}

TEST_CASE("posterior updating") {
  const auto part = make_partition(21, {range(1, 10), range(11, 20)});
  Dataset d(21, 1, 1, {}, false);
  for (WorldIndex w = 1; w <= 7; ++w) d.set_outcome(0, w, 1);
  auto prior = PosteriorState::uniform_prior(2, 1);
  auto post = posterior_update(d, part, prior);
  CHECK(post.shapes[0][0] == BetaShape{8, 4});
  CHECK(post.shapes[1][0] == BetaShape{1, 11});

  std::vector<bool> only_a(21, false);
  for (auto w : part.blocks[0]) only_a[w] = true;
  auto local = posterior_update(d, part, prior, only_a);
  CHECK(local.shapes[1] == prior.shapes[1]);

  CHECK(posterior_update(Dataset(21, 1, 0, {}, false), part, prior) == prior);

  auto spec = parse_spec("atoms = p q\norbit *: prior = beta(1, 1)\ndesignated = 0.5, 0.5\n");
  auto x = sample_replicates(spec, part, 300, 1), y = sample_replicates(spec, part, 200, 2);
  auto p2 = PosteriorState::uniform_prior(2, 2, {0.5, 2.0});
  CHECK(posterior_update(Dataset::concat(x, y), part, p2) ==
        posterior_update(y, part, posterior_update(x, part, p2)));
}

TEST_CASE("cross-orbit coupling report") {
  const auto part = make_partition(41, {range(1, 20), range(21, 40)});
  auto ind = parse_spec("atoms = p\norbit 0: prior = point(0.2)\norbit 1: prior = point(0.8)\n"
                        "designated = 0.5\n");
  auto d = sample_replicates(ind, part, 50000, 1);
  auto r = cross_orbit_report(d, part, 0, 1, 0, CouplingExpectation::Uncorrelated);
  CHECK(std::abs(r.correlation) <= 0.02);
  CHECK(r.report.pass);
  CHECK(r.distinct_marginals);
  CHECK(test_rigidity(d, part).pass);

  auto shared = parse_spec("atoms = p\norbit *: prior = mixture(0.5: 0.2, 0.5: 0.8)\ncoupling = shared\n"
                           "designated = 0.5\n");
  auto s = cross_orbit_report(sample_replicates(shared, part, 20000, 2), part, 0, 1, 0,
                              CouplingExpectation::Correlated, 0.9);
  CHECK(s.correlation >= 0.9);
  CHECK(s.report.pass);
  CHECK_THROWS_AS(cross_orbit_report(d, part, 0, 0), Error);
}
