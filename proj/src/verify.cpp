#include "modalx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "modalx/detail/parallel.hpp"
#include "modalx/error.hpp"
#include "modalx/random.hpp"
#include "modalx/sampler.hpp"

namespace modalx {

double chi_square_sf(double statistic, double df) {
  if (std::isinf(statistic)) return 0.0;
  if (df <= 0) return statistic > 0 ? 0.0 : 1.0;
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

namespace {

// Fills the category of every tuple for replicate r; a null stream means the
// observed data, otherwise one draw from the resampling scheme.
using CategoryReader = std::function<void(std::size_t r, RandomStream* s, std::vector<std::uint32_t>& cats)>;

std::string format_double(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

double pearson_homogeneity(const std::vector<double>& counts, std::size_t T, std::size_t C) {
  double stat = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    double pooled = 0.0;
    for (std::size_t t = 0; t < T; ++t) pooled += counts[t * C + c];
    if (pooled == 0.0) continue;
    const double expected = pooled / static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double d = counts[t * C + c] - expected;
      stat += d * d / expected;
    }
  }
  return stat;
}

ComponentResult homogeneity_core(std::size_t n, std::size_t T, std::size_t C, const CategoryReader& reader,
                                 const TestOptions& options, std::uint64_t stream_index, std::string label) {
  ComponentResult res;
  res.label = std::move(label);
  res.tuples = T;
  if (n == 0) throw Error("empty dataset");

  const std::size_t D = T * C;
  std::vector<double> counts(D, 0.0);
  std::vector<std::uint32_t> observed(n * T), cats(T);
  for (std::size_t r = 0; r < n; ++r) {
    reader(r, nullptr, cats);
    std::copy(cats.begin(), cats.end(), observed.begin() + static_cast<std::ptrdiff_t>(r * T));
    for (std::size_t t = 0; t < T; ++t) counts[t * C + cats[t]] += 1.0;
  }
  std::vector<std::size_t> active;
  double min_pooled = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < C; ++c) {
    double pooled = 0.0;
    for (std::size_t t = 0; t < T; ++t) pooled += counts[t * C + c];
    if (pooled > 0) {
      active.push_back(c);
      min_pooled = std::min(min_pooled, pooled / static_cast<double>(T));
    }
  }
  res.categories = active.size();
  if (T < 2 || active.size() < 2) {
    res.method = "degenerate (single tuple or single observed category)";
    return res;
  }

  if (min_pooled < options.expected_floor) {
    // Randomization test on the Pearson homogeneity statistic.
    const double stat = pearson_homogeneity(counts, T, C);
    const double budget = 5e8;
    std::size_t R = options.resamples;
    const double per = static_cast<double>(n) * static_cast<double>(T);
    if (per * static_cast<double>(R) > budget)
      R = std::max<std::size_t>(999, static_cast<std::size_t>(budget / per));
    std::vector<std::uint8_t> exceed(R, 0);
    parallel_for(R, resolve_threads(options.threads), [&](std::size_t begin, std::size_t end) {
      std::vector<double> rc(D);
      std::vector<std::uint32_t> local(T);
      for (std::size_t b = begin; b < end; ++b) {
        std::fill(rc.begin(), rc.end(), 0.0);
        auto s = RandomStream::derive(options.seed, b, RandomStream::kResample, stream_index);
        for (std::size_t r = 0; r < n; ++r) {
          reader(r, &s, local);
          for (std::size_t t = 0; t < T; ++t) rc[t * C + local[t]] += 1.0;
        }
        exceed[b] = pearson_homogeneity(rc, T, C) >= stat * (1 - 1e-12);
      }
    });
    const auto hits = std::accumulate(exceed.begin(), exceed.end(), std::size_t{0});
    res.statistic = stat;
    res.df = static_cast<double>((T - 1) * (active.size() - 1));
    res.p_value = static_cast<double>(1 + hits) / static_cast<double>(R + 1);
    res.method = "randomization (" + std::to_string(R) + " resamples, Pearson statistic)";
    return res;
  }

  // Co-occurrence of (tuple, category) indicators for the covariance.
  std::vector<std::size_t> index_of(C, SIZE_MAX);
  for (std::size_t i = 0; i < active.size(); ++i) index_of[active[i]] = i;
  const std::size_t A = active.size();
  const std::size_t TA = T * A;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(TA), static_cast<Eigen::Index>(TA));
  std::vector<Eigen::Index> idx(T);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t t = 0; t < T; ++t) idx[t] = static_cast<Eigen::Index>(t * A + index_of[observed[r * T + t]]);
    for (std::size_t a = 0; a < T; ++a)
      for (std::size_t b = a; b < T; ++b) M(idx[a], idx[b]) += 1.0;
  }
  M = M.selfadjointView<Eigen::Upper>();
  Eigen::VectorXd zbar(static_cast<Eigen::Index>(TA));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t i = 0; i < A; ++i)
      zbar(static_cast<Eigen::Index>(t * A + i)) = counts[t * C + active[i]] / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  Eigen::MatrixXd covz = (M / nn - zbar * zbar.transpose()) * (nn / std::max(1.0, nn - 1.0));

  // Differences against tuple 0, dropping the last active category.
  const std::size_t dim = (T - 1) * (A - 1);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(TA));
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t i = 0; i + 1 < A; ++i) {
      const auto row = static_cast<Eigen::Index>((t - 1) * (A - 1) + i);
      L(row, static_cast<Eigen::Index>(t * A + i)) = 1.0;
      L(row, static_cast<Eigen::Index>(i)) = -1.0;
    }
  const Eigen::VectorXd ybar = L * zbar;
  const Eigen::MatrixXd S = L * covz * L.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const auto& lambda = eig.eigenvalues();
  const auto& V = eig.eigenvectors();
  const double lmax = std::max(0.0, lambda.maxCoeff());
  const double tol = std::max(1e-14, lmax * 1e-10 * static_cast<double>(dim));
  double stat = 0.0;
  std::size_t rank = 0;
  Eigen::VectorXd residual = ybar;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) <= tol) continue;
    ++rank;
    const double proj = V.col(i).dot(ybar);
    stat += proj * proj / lambda(i);
    residual -= proj * V.col(i);
  }
  stat *= nn;
  // A mean difference along a direction with no sampling variance is a
  // deterministic violation.
  if (residual.norm() > 1e-9) stat = std::numeric_limits<double>::infinity();
  res.statistic = stat;
  res.df = static_cast<double>(rank);
  res.p_value = chi_square_sf(stat, res.df);
  res.method = "paired Wald chi-square";
  return res;
}

std::uint32_t tuple_category(const Dataset& data, std::size_t r, const std::vector<WorldIndex>& tuple) {
  std::uint32_t c = 0;
  const auto k = data.atoms();
  for (std::size_t i = 0; i < tuple.size(); ++i) c |= data.outcome(r, tuple[i]) << (k * i);
  return c;
}

void check_worlds(const Dataset& data, const std::vector<WorldIndex>& worlds) {
  for (auto w : worlds)
    if (w >= data.worlds()) throw Error("world " + std::to_string(w) + " outside the dataset");
}

// Category reader for tuples over a set of exchangeable participant worlds.
CategoryReader relabeling_reader(const Dataset& data, const std::vector<std::vector<WorldIndex>>& tuples,
                                 const std::vector<WorldIndex>& exchangeable) {
  std::vector<WorldIndex> participants = exchangeable;
  for (const auto& t : tuples) participants.insert(participants.end(), t.begin(), t.end());
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());
  std::vector<std::vector<std::size_t>> local;
  for (const auto& t : tuples) {
    std::vector<std::size_t> l;
    for (auto w : t)
      l.push_back(static_cast<std::size_t>(
          std::lower_bound(participants.begin(), participants.end(), w) - participants.begin()));
    local.push_back(std::move(l));
  }
  // Only worlds listed as exchangeable are shuffled.
  std::vector<std::size_t> movable;
  for (std::size_t i = 0; i < participants.size(); ++i)
    if (std::binary_search(exchangeable.begin(), exchangeable.end(), participants[i])) movable.push_back(i);
  const auto k = data.atoms();
  return [&data, participants, local, movable, k](std::size_t r, RandomStream* s, std::vector<std::uint32_t>& cats) {
    thread_local std::vector<std::size_t> perm;
    perm.resize(participants.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (s) {
      for (std::size_t i = movable.size(); i > 1; --i) {
        const auto j = s->below(i);
        std::swap(perm[movable[i - 1]], perm[movable[j]]);
      }
    }
    for (std::size_t t = 0; t < local.size(); ++t) {
      std::uint32_t c = 0;
      for (std::size_t i = 0; i < local[t].size(); ++i)
        c |= data.outcome(r, participants[perm[local[t][i]]]) << (k * i);
      cats[t] = c;
    }
  };
}

}  // namespace

TestReport summarize_components(std::string name, std::size_t sample_size, const TestOptions& options,
                                std::vector<ComponentResult> components) {
  TestReport rep;
  rep.name = std::move(name);
  rep.sample_size = sample_size;
  rep.seed = options.seed;
  const std::size_t m = std::max<std::size_t>(1, components.size());
  rep.threshold = options.bonferroni ? options.alpha / static_cast<double>(m) : options.alpha;
  rep.p_value = 1.0;
  rep.statistic = 0.0;
  bool any_randomized = false;
  for (const auto& c : components) {
    if (c.p_value < rep.p_value || (c.p_value == rep.p_value && c.statistic > rep.statistic)) {
      rep.p_value = c.p_value;
      rep.statistic = c.statistic;
    }
    any_randomized |= c.method.rfind("randomization", 0) == 0;
  }
  rep.pass = rep.p_value >= rep.threshold;
  rep.null_distribution = "chi-square with df = covariance rank (paired Wald)";
  if (any_randomized) rep.null_distribution += "; randomization where expected counts < " + format_double(options.expected_floor);
  rep.null_distribution += options.bonferroni ? "; Bonferroni over " + std::to_string(m) + " component(s)" : "";
  rep.components = std::move(components);
  return rep;
}

namespace {

std::vector<WorldIndex> seeded_subset(const WorldSet& worlds, std::size_t cap, std::uint64_t seed,
                                      std::uint64_t index) {
  if (worlds.size() <= cap) return worlds;
  std::vector<WorldIndex> pool = worlds;
  auto s = RandomStream::derive(seed, 0, RandomStream::kSubset, index);
  for (std::size_t i = 0; i < cap; ++i) std::swap(pool[i], pool[i + s.below(pool.size() - i)]);
  pool.resize(cap);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::size_t factorial_small(std::size_t m) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

ComponentResult paired_homogeneity(const Dataset& data, const std::vector<std::vector<WorldIndex>>& tuples,
                                   const TestOptions& options, std::uint64_t stream_index,
                                   const std::vector<WorldIndex>& exchangeable_worlds) {
  for (const auto& t : tuples) check_worlds(data, t);
  if (tuples.empty()) throw Error("no tuples to compare");
  const std::size_t m = tuples.front().size();
  for (const auto& t : tuples)
    if (t.size() != m) throw Error("tuples must have equal length");
  std::vector<WorldIndex> ex = exchangeable_worlds;
  std::sort(ex.begin(), ex.end());
  return homogeneity_core(data.replicates(), tuples.size(), std::size_t{1} << (data.atoms() * m),
                          relabeling_reader(data, tuples, ex), options, stream_index, "tuples");
}

TestReport test_rigidity(const Dataset& data, const OrbitPartition& partition, const TestOptions& options) {
  if (data.replicates() == 0) throw Error("empty dataset");
  std::vector<ComponentResult> comps;
  std::vector<std::string> notes;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    const auto& block = partition.blocks[b];
    if (block.size() < 2) continue;
    check_worlds(data, block);
    const auto worlds = seeded_subset(block, options.max_worlds_per_orbit, options.seed, b);
    if (worlds.size() < block.size())
      notes.push_back("orbit " + std::to_string(b) + ": tested " + std::to_string(worlds.size()) + " of " +
                      std::to_string(block.size()) + " worlds");
    std::vector<std::vector<WorldIndex>> tuples;
    for (auto w : worlds) tuples.push_back({w});
    auto c = homogeneity_core(data.replicates(), tuples.size(), std::size_t{1} << data.atoms(),
                              relabeling_reader(data, tuples, worlds), options, b,
                              "orbit " + std::to_string(b));
    comps.push_back(std::move(c));
  }
  auto rep = summarize_components("rigidity", data.replicates(), options, std::move(comps));
  if (rep.components.empty()) notes.push_back("no orbit has two or more worlds; vacuous pass");
  rep.notes = std::move(notes);
  return rep;
}

TestReport test_exchangeability(const Dataset& data, const WorldSet& orbit, std::size_t m,
                                const TestOptions& options) {
  if (data.replicates() == 0) throw Error("empty dataset");
  if (m < 1 || m > 3) throw Error("tuple size must be 1, 2 or 3");
  if (orbit.size() < m) throw Error("orbit has fewer than m worlds");
  check_worlds(data, orbit);
  const std::size_t C = std::size_t{1} << (data.atoms() * m);
  const std::size_t orderings = factorial_small(m);
  // Keep (T - 1)(C - 1) within the dimension cap.
  std::size_t subsets = options.max_subsets;
  while (subsets > 1 && (subsets * orderings - 1) * (C - 1) > options.max_dimension) --subsets;

  std::vector<std::vector<WorldIndex>> chosen;
  // All subsets when few; otherwise half consecutive windows, half random.
  std::vector<std::size_t> pick(m);
  std::function<void(std::size_t, std::size_t)> all = [&](std::size_t start, std::size_t depth) {
    if (chosen.size() > subsets) return;
    if (depth == m) {
      std::vector<WorldIndex> s;
      for (auto i : pick) s.push_back(orbit[i]);
      chosen.push_back(s);
      return;
    }
    for (std::size_t i = start; i < orbit.size(); ++i) {
      pick[depth] = i;
      all(i + 1, depth + 1);
    }
  };
  all(0, 0);
  std::vector<std::string> notes;
  if (chosen.size() > subsets) {
    chosen.clear();
    auto s = RandomStream::derive(options.seed, 0, RandomStream::kSubset, 1000 + m);
    const std::size_t windows = subsets / 2;
    for (std::size_t i = 0; i < windows; ++i) {
      const auto start = s.below(orbit.size() - m + 1);
      std::vector<WorldIndex> w(orbit.begin() + static_cast<std::ptrdiff_t>(start),
                                orbit.begin() + static_cast<std::ptrdiff_t>(start + m));
      chosen.push_back(w);
    }
    while (chosen.size() < subsets) {
      std::vector<WorldIndex> pool = orbit;
      for (std::size_t i = 0; i < m; ++i) std::swap(pool[i], pool[i + s.below(pool.size() - i)]);
      pool.resize(m);
      std::sort(pool.begin(), pool.end());
      chosen.push_back(pool);
    }
    notes.push_back(std::to_string(subsets) + " sampled " + std::to_string(m) + "-subsets (" +
                    std::to_string(windows) + " consecutive windows)");
  }
  std::vector<std::vector<WorldIndex>> tuples;
  std::vector<WorldIndex> participants;
  for (auto subset : chosen) {
    std::sort(subset.begin(), subset.end());
    participants.insert(participants.end(), subset.begin(), subset.end());
    do tuples.push_back(subset);
    while (std::next_permutation(subset.begin(), subset.end()));
  }
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());
  auto c = homogeneity_core(data.replicates(), tuples.size(), C, relabeling_reader(data, tuples, participants),
                            options, 2000 + m, "orbit worlds " + std::to_string(orbit.front()) + ".." +
                                                   std::to_string(orbit.back()) + ", m=" + std::to_string(m));
  auto rep = summarize_components("exchangeability", data.replicates(), options, {c});
  rep.notes = std::move(notes);
  return rep;
}

TestReport test_invariance_mc(const Dataset& data, const std::vector<Permutation>& generators,
                              const std::vector<WorldIndex>& worlds, const TestOptions& options) {
  if (data.replicates() == 0) throw Error("empty dataset");
  check_worlds(data, worlds);
  if (worlds.size() > 3) throw Error("projections are limited to 3 worlds");
  std::vector<ComponentResult> comps;
  std::vector<std::string> notes;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const auto& pi = generators[g];
    if (pi.degree() != data.worlds()) throw Error("generator degree does not match the dataset");
    if (pi.is_identity()) continue;
    std::vector<WorldIndex> proj = worlds;
    if (proj.empty())
      for (WorldIndex w = 0; w < pi.degree() && proj.size() < 3; ++w)
        if (pi(w) != w) proj.push_back(w);
    const auto inv = pi.inverse();
    // Candidate tuples pi^{-j}(proj) for j over the period on proj.
    std::vector<std::vector<WorldIndex>> cand{proj};
    const std::size_t max_period = 100000;
    while (cand.size() < max_period) {
      std::vector<WorldIndex> next;
      for (auto w : cand.back()) next.push_back(inv(w));
      if (next == proj) break;
      cand.push_back(std::move(next));
    }
    const bool full_period = cand.size() < max_period;
    if (!full_period) notes.push_back("generator " + std::to_string(g) + ": period too long for randomization");
    const std::vector<std::vector<WorldIndex>> tuples{cand[0], cand.size() > 1 ? cand[1] : cand[0]};
    CategoryReader reader = [&data, cand, full_period](std::size_t r, RandomStream* s, std::vector<std::uint32_t>& cats) {
      const std::size_t L = cand.size();
      const std::size_t j = (s && full_period) ? static_cast<std::size_t>(s->below(L)) : 0;
      cats[0] = tuple_category(data, r, cand[j]);
      cats[1] = tuple_category(data, r, cand[(j + 1) % L]);
    };
    std::string label = "generator " + std::to_string(g) + " on worlds";
    for (auto w : proj) label += " " + std::to_string(w);
    comps.push_back(homogeneity_core(data.replicates(), 2, std::size_t{1} << (data.atoms() * proj.size()), reader,
                                     options, 3000 + g, label));
  }
  auto rep = summarize_components("invariance", data.replicates(), options, std::move(comps));
  if (rep.components.empty()) notes.push_back("no non-identity generator; vacuous pass");
  rep.notes = std::move(notes);
  return rep;
}

std::vector<std::vector<double>> outcome_frequencies(const Dataset& data, const WorldSet& orbit) {
  check_worlds(data, orbit);
  if (orbit.empty()) throw Error("orbit is empty");
  std::vector<std::vector<double>> out(data.replicates(), std::vector<double>(std::size_t{1} << data.atoms(), 0.0));
  const double inc = 1.0 / static_cast<double>(orbit.size());
  for (std::size_t r = 0; r < data.replicates(); ++r)
    for (auto w : orbit) out[r][data.outcome(r, w)] += inc;
  return out;
}

std::vector<Mode> find_modes(const std::vector<double>& values, const std::vector<double>& edges,
                             const std::vector<std::size_t>& hist, double min_mass) {
  const std::size_t B = hist.size();
  if (B == 0 || values.empty()) return {};
  std::vector<double> s(B);
  for (std::size_t i = 0; i < B; ++i) {
    const double left = i > 0 ? static_cast<double>(hist[i - 1]) : 0.0;
    const double right = i + 1 < B ? static_cast<double>(hist[i + 1]) : 0.0;
    s[i] = (left + 2.0 * static_cast<double>(hist[i]) + right) / 4.0;
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < B; ++i) {
    const bool left_ok = i == 0 || s[i] > s[i - 1];
    const bool right_ok = i + 1 == B || s[i] >= s[i + 1];
    if (left_ok && right_ok && s[i] > 0) peaks.push_back(i);
  }
  auto valley = [&](std::size_t a, std::size_t b) {
    std::size_t v = a;
    for (std::size_t i = a; i <= b; ++i)
      if (s[i] < s[v]) v = i;
    return v;
  };
  const double total = static_cast<double>(values.size());
  auto basin_bounds = [&](std::size_t p) {
    const auto it = std::find(peaks.begin(), peaks.end(), p);
    const std::size_t idx = static_cast<std::size_t>(it - peaks.begin());
    const std::size_t lo = idx == 0 ? 0 : valley(peaks[idx - 1], p) + 1;
    const std::size_t hi = idx + 1 == peaks.size() ? B - 1 : valley(p, peaks[idx + 1]);
    return std::pair{lo, hi};
  };
  auto mass_of = [&](std::size_t p) {
    const auto [lo, hi] = basin_bounds(p);
    double m = 0;
    for (std::size_t i = lo; i <= hi; ++i) m += static_cast<double>(hist[i]);
    return m / total;
  };
  // Merge shallow neighbours, then drop light basins, until stable.
  bool changed = true;
  while (changed && peaks.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
      const auto v = valley(peaks[i], peaks[i + 1]);
      if (s[v] > 0.5 * std::min(s[peaks[i]], s[peaks[i + 1]])) {
        peaks.erase(peaks.begin() + static_cast<std::ptrdiff_t>(s[peaks[i]] < s[peaks[i + 1]] ? i : i + 1));
        changed = true;
        break;
      }
    }
    if (changed) continue;
    std::size_t lightest = 0;
    for (std::size_t i = 1; i < peaks.size(); ++i)
      if (mass_of(peaks[i]) < mass_of(peaks[lightest])) lightest = i;
    if (mass_of(peaks[lightest]) < min_mass) {
      peaks.erase(peaks.begin() + static_cast<std::ptrdiff_t>(lightest));
      changed = true;
    }
  }
  std::vector<Mode> modes;
  for (auto p : peaks) {
    const auto [lo, hi] = basin_bounds(p);
    std::size_t arg = lo;
    for (std::size_t i = lo; i <= hi; ++i)
      if (hist[i] > hist[arg]) arg = i;
    Mode m;
    m.location = 0.5 * (edges[arg] + edges[arg + 1]);
    m.mass = mass_of(p);
    double sum = 0;
    std::size_t count = 0;
    for (double v : values) {
      const bool in = v >= edges[lo] && (v < edges[hi + 1] || (hi + 1 == B && v <= edges[B]));
      if (in) {
        sum += v;
        ++count;
      }
    }
    m.basin_mean = count ? sum / static_cast<double>(count) : m.location;
    if (m.mass >= min_mass || peaks.size() == 1) modes.push_back(m);
  }
  return modes;
}

DirectingEstimate estimate_directing(const Dataset& data, const WorldSet& orbit, std::size_t atom,
                                     std::size_t bins) {
  check_worlds(data, orbit);
  if (orbit.empty()) throw Error("orbit is empty");
  if (atom >= data.atoms()) throw Error("atom index out of range");
  if (bins == 0) throw Error("need at least one histogram bin");
  DirectingEstimate est;
  est.frequencies.resize(data.replicates());
  for (std::size_t r = 0; r < data.replicates(); ++r) {
    std::size_t ones = 0;
    for (auto w : orbit) ones += (data.outcome(r, w) >> atom) & 1u;
    est.frequencies[r] = static_cast<double>(ones) / static_cast<double>(orbit.size());
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, data.replicates()));
  for (double f : est.frequencies) est.mean += f;
  est.mean /= n;
  for (double f : est.frequencies) est.sd += (f - est.mean) * (f - est.mean);
  est.sd = std::sqrt(est.sd / std::max(1.0, n - 1));
  for (std::size_t i = 0; i <= bins; ++i) est.bin_edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  est.histogram.assign(bins, 0);
  for (double f : est.frequencies)
    ++est.histogram[std::min(bins - 1, static_cast<std::size_t>(f * static_cast<double>(bins)))];
  est.modes = find_modes(est.frequencies, est.bin_edges, est.histogram);
  return est;
}

TestReport test_principal_principle(const Dataset& data, const OrbitPartition& partition, std::size_t atom,
                                    const CalibrationOptions& options, std::vector<CalibrationBin>* bins_out) {
  if (!data.has_latents()) throw Error("principal-principle calibration needs recorded latents");
  if (atom >= data.atoms()) throw Error("atom index out of range");
  if (options.bins == 0) throw Error("need at least one bin");
  TestReport rep;
  rep.name = "principal_principle";
  rep.sample_size = data.replicates();
  rep.threshold = options.tolerance;
  rep.null_distribution = "per-bin |frequency - mean Theta| <= tolerance";
  rep.deviation = 0.0;
  std::vector<CalibrationBin> all;
  std::size_t evaluated = 0;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    const auto& block = partition.blocks[b];
    std::vector<CalibrationBin> bins(options.bins);
    std::vector<double> theta_sum(options.bins, 0.0), successes(options.bins, 0.0);
    for (std::size_t i = 0; i < options.bins; ++i) {
      bins[i].lower = static_cast<double>(i) / static_cast<double>(options.bins);
      bins[i].upper = static_cast<double>(i + 1) / static_cast<double>(options.bins);
    }
    for (std::size_t r = 0; r < data.replicates(); ++r) {
      const double theta = data.latent_theta(r, b, atom);
      const auto i = std::min(options.bins - 1, static_cast<std::size_t>(theta * static_cast<double>(options.bins)));
      ++bins[i].replicates;
      bins[i].observations += block.size();
      theta_sum[i] += theta * static_cast<double>(block.size());
      for (auto w : block) successes[i] += (data.outcome(r, w) >> atom) & 1u;
    }
    for (std::size_t i = 0; i < options.bins; ++i) {
      auto& bin = bins[i];
      if (bin.observations == 0) continue;
      bin.mean_theta = theta_sum[i] / static_cast<double>(bin.observations);
      bin.frequency = successes[i] / static_cast<double>(bin.observations);
      bin.evaluated = bin.observations >= options.min_observations;
      ComponentResult c;
      c.label = "orbit " + std::to_string(b) + " bin [" + format_double(bin.lower) + ", " + format_double(bin.upper) + ")";
      c.statistic = std::abs(bin.frequency - bin.mean_theta);
      c.method = bin.evaluated ? "calibration" : "skipped: fewer than " + std::to_string(options.min_observations) + " observations";
      c.p_value = std::numeric_limits<double>::quiet_NaN();
      rep.components.push_back(c);
      if (bin.evaluated) {
        ++evaluated;
        rep.deviation = std::max(rep.deviation, c.statistic);
      }
    }
    all.insert(all.end(), bins.begin(), bins.end());
  }
  rep.statistic = rep.deviation;
  rep.pass = rep.deviation <= options.tolerance;
  const auto skipped = std::count_if(rep.components.begin(), rep.components.end(),
                                     [](const ComponentResult& c) { return c.method != "calibration"; });
  if (skipped > 0) rep.notes.push_back(std::to_string(skipped) + " non-empty bin(s) skipped for lack of observations");
  if (evaluated == 0) rep.notes.push_back("no bin reached the observation floor; vacuous pass");
  if (bins_out) *bins_out = std::move(all);
  return rep;
}

PosteriorState PosteriorState::uniform_prior(std::size_t blocks, std::size_t atoms, BetaShape prior) {
  if (!(prior.a > 0) || !(prior.b > 0)) throw Error("Beta shapes must be > 0");
  PosteriorState s;
  s.shapes.assign(blocks, std::vector<BetaShape>(atoms, prior));
  return s;
}

PosteriorState posterior_update(const Dataset& data, const OrbitPartition& partition, const PosteriorState& prior,
                                const std::vector<bool>& observed) {
  if (prior.shapes.size() != partition.size()) throw Error("posterior state does not match the partition");
  if (!observed.empty() && observed.size() != data.worlds()) throw Error("observation mask has the wrong length");
  PosteriorState post = prior;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    if (prior.shapes[b].size() != data.atoms()) throw Error("posterior state does not match the atom count");
    for (const auto& s : prior.shapes[b])
      if (!(s.a > 0) || !(s.b > 0)) throw Error("Beta shapes must be > 0");
    std::vector<std::uint64_t> ones(data.atoms(), 0);
    std::uint64_t trials = 0;
    for (auto w : partition.blocks[b]) {
      if (!observed.empty() && !observed[w]) continue;
      check_worlds(data, {w});
      trials += data.replicates();
      for (std::size_t r = 0; r < data.replicates(); ++r)
        for (std::size_t l = 0; l < data.atoms(); ++l) ones[l] += (data.outcome(r, w) >> l) & 1u;
    }
    if (trials == 0) continue;
    for (std::size_t l = 0; l < data.atoms(); ++l) {
      post.shapes[b][l].a += static_cast<double>(ones[l]);
      post.shapes[b][l].b += static_cast<double>(trials - ones[l]);
    }
  }
  return post;
}

CrossOrbitReport cross_orbit_report(const Dataset& data, const OrbitPartition& partition, std::size_t block_a,
                                    std::size_t block_b, std::size_t atom, CouplingExpectation expectation,
                                    double tolerance) {
  if (block_a >= partition.size() || block_b >= partition.size()) throw Error("block index out of range");
  if (block_a == block_b) throw Error("cross-orbit report needs two distinct orbits");
  if (data.replicates() < 2) throw Error("need at least two replicates");
  const auto ea = estimate_directing(data, partition.blocks[block_a], atom, 1);
  const auto eb = estimate_directing(data, partition.blocks[block_b], atom, 1);
  CrossOrbitReport out;
  out.first = {block_a, partition.blocks[block_a].size(), ea.mean, ea.sd};
  out.second = {block_b, partition.blocks[block_b].size(), eb.mean, eb.sd};
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t r = 0; r < data.replicates(); ++r) {
    const double da = ea.frequencies[r] - ea.mean, db = eb.frequencies[r] - eb.mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  auto& rep = out.report;
  rep.name = "coupling";
  rep.sample_size = data.replicates();
  if (saa == 0 || sbb == 0) {
    out.correlation = 0.0;
    rep.notes.push_back("a frequency series is constant; correlation reported as 0");
  } else {
    out.correlation = sab / std::sqrt(saa * sbb);
  }
  const double n = static_cast<double>(data.replicates());
  const double se = std::hypot(ea.sd, eb.sd) / std::sqrt(n);
  out.distinct_marginals = std::abs(ea.mean - eb.mean) > 4 * se;
  if (out.distinct_marginals)
    rep.notes.push_back("orbits have distinct marginal frequencies (" + format_double(ea.mean) + " vs " +
                        format_double(eb.mean) + "); allowed, informational");
  rep.statistic = out.correlation;
  rep.threshold = tolerance;
  switch (expectation) {
    case CouplingExpectation::None:
      rep.null_distribution = "informational (no expectation)";
      rep.deviation = std::abs(out.correlation);
      rep.pass = true;
      break;
    case CouplingExpectation::Uncorrelated:
      rep.null_distribution = "|r| <= threshold";
      rep.deviation = std::abs(out.correlation);
      rep.pass = rep.deviation <= tolerance;
      break;
    case CouplingExpectation::Correlated:
      rep.null_distribution = "r >= threshold";
      rep.deviation = out.correlation;
      rep.pass = out.correlation >= tolerance;
      break;
  }
  return out;
}

}  // namespace modalx
