#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "modalx/error.hpp"
#include "modalx/measure.hpp"
#include "modalx/sampler.hpp"

using namespace modalx;

namespace {

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

}  // namespace

TEST_CASE("random stream distributions") {
  auto s = RandomStream::derive(1, 2, 3, 4);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (double shape : {0.3, 1.0, 2.5, 9.0}) {
    double m = 0, v = 0;
    for (int i = 0; i < n; ++i) {
      const double g = s.gamma(shape);
      m += g;
      v += g * g;
    }
    m /= n;
    v = v / n - m * m;
    CAPTURE(shape);
    CHECK(std::abs(m - shape) < 5 * std::sqrt(shape / n));
    CHECK(std::abs(v - shape) < 0.05 * shape + 0.01);
  }
  double bm = 0;
  for (int i = 0; i < n; ++i) bm += s.beta(2, 6);
  CHECK(std::abs(bm / n - 0.25) < 0.003);
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < 60000; ++i) ++counts[s.below(3)];
  for (auto& [k, c] : counts) CHECK(std::abs(c - 20000) < 600);
  CHECK(RandomStream::derive(1, 2, 3, 4).next_u64() == RandomStream::derive(1, 2, 3, 4).next_u64());
  CHECK(RandomStream::derive(1, 2, 3, 4).next_u64() != RandomStream::derive(1, 2, 3, 5).next_u64());
}

TEST_CASE("draw_latents") {
  const auto part = make_partition(5, {{1, 2}, {3, 4}});
  auto spec = parse_spec("atoms = p\norbit 0: prior = point(0.3)\norbit 1: prior = point(0.9)\ndesignated = 0.5\n");
  auto l = draw_latents(spec, part, 1, 0);
  CHECK(l[0].parameters()[0] == 0.3);
  CHECK(l[1].parameters()[0] == 0.9);

  auto shared = parse_spec("atoms = p\norbit *: prior = beta(1, 1)\ncoupling = shared\ndesignated = 0.5\n");
  for (std::uint64_t r = 0; r < 50; ++r) {
    auto d = draw_latents(shared, part, 9, r);
    CHECK(d[0] == d[1]);
  }
  auto uniform = parse_spec("atoms = p\norbit *: prior = beta(1, 1)\ndesignated = 0.5\n");
  const auto data = sample_replicates(uniform, make_partition(2, {{1}}), 100000, 17);
  double mean = 0;
  for (std::size_t r = 0; r < data.replicates(); ++r) mean += data.latent_theta(r, 0, 0);
  CHECK(std::abs(mean / 100000 - 0.5) <= 0.005);
  // Independent blocks use distinct streams.
  auto two = draw_latents(uniform, part, 9, 0);
  CHECK_FALSE(two[0] == two[1]);

  auto dir = parse_spec("atoms = p q\norbit *: prior = dirichlet(1)\ndesignated = 0.5, 0.5\n");
  auto dl = draw_latents(dir, part, 3, 0);
  CHECK(dl[0].form() == DirectingMeasure::Form::Full);
}

TEST_CASE("sample_valuation") {
  const auto part = make_partition(6, {{1, 2, 3}, {4, 5}});
  auto s = RandomStream::derive(5, 0, RandomStream::kValues, 0);
  std::vector<DirectingMeasure> latents{DirectingMeasure::full({1, 0, 0, 0}),
                                        DirectingMeasure::bernoulli({1.0, 0.0})};
  for (int i = 0; i < 100; ++i) {
    auto v = sample_valuation(latents, part, DirectingMeasure::bernoulli({0.5, 0.5}), s);
    CHECK(v[1] == 0);
    CHECK(v[2] == 0);
    CHECK(v[3] == 0);
    CHECK(v[4] == 1);
    CHECK(v[5] == 1);
  }
  // Orbit of 200 worlds at theta 0.2: within-replicate frequency within 3 sigma.
  const auto big = make_partition(201, {range(1, 200)});
  auto spec = parse_spec("atoms = p\norbit 0: prior = point(0.2)\ndesignated = 0.5\n");
  auto data = sample_replicates(spec, big, 200, 8);
  int outside = 0;
  for (std::size_t r = 0; r < data.replicates(); ++r) {
    int ones = 0;
    for (WorldIndex w = 1; w <= 200; ++w) ones += static_cast<int>(data.outcome(r, w));
    outside += std::abs(ones / 200.0 - 0.2) > 0.09;
  }
  CHECK(outside <= 2);
}

TEST_CASE("sampling is deterministic and schedule independent") {
  const auto part = make_partition(9, {range(1, 4), range(5, 8)});
  auto spec = parse_spec("atoms = p q\norbit 0: prior = beta(2, 3)\norbit 1: prior = dirichlet(0.7)\n"
                         "designated = full(0.1, 0.2, 0.3, 0.4)\n");
  auto one = sample_replicates(spec, part, 5000, 42, {1});
  auto many = sample_replicates(spec, part, 5000, 42, {7});
  CHECK(one == many);
  CHECK(dataset_csv(one) == dataset_csv(many));
  auto other = sample_replicates(spec, part, 5000, 43, {1});
  CHECK_FALSE(one == other);

  // A replicate depends only on its own index.
  auto prefix = sample_replicates(spec, part, 10, 42, {1});
  for (std::size_t r = 0; r < 10; ++r) {
    CHECK(std::equal(prefix.outcomes_of(r).begin(), prefix.outcomes_of(r).end(), one.outcomes_of(r).begin()));
  }

  const auto dir = std::filesystem::temp_directory_path() / "modalx_sampler_test";
  std::filesystem::create_directories(dir);
  write_dataset(one, dir / "d.csv");
  auto back = read_dataset(dir / "d.csv");
  CHECK(back.seed == 42);
  CHECK(back.spec_fingerprint == one.spec_fingerprint);
  CHECK(dataset_csv(back) == dataset_csv(one));
  std::filesystem::remove_all(dir);
}

TEST_CASE("empirical law converges to the exact hierarchical measure") {
  const auto part = make_partition(3, {{1, 2}});
  auto spec = parse_spec("atoms = p\norbit 0: prior = mixture(0.5: 0.2, 0.5: 0.8)\ndesignated = 0.3\n");
  auto exact = exact_hier_measure(spec, part);
  auto data = sample_replicates(spec, part, 200000, 2);
  const ValuationSpace space(3, 1);
  std::vector<double> freq(space.size(), 0.0);
  for (std::size_t r = 0; r < data.replicates(); ++r) {
    auto o = data.outcomes_of(r);
    freq[space.index(Valuation(o.begin(), o.end()))] += 1.0 / 200000;
  }
  double tv = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) tv += std::abs(freq[i] - exact[i]) / 2;
  CHECK(tv <= 0.01);
}
