#include "modalx/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "modalx/error.hpp"
#include "modalx/measure.hpp"
#include "modalx/sampler.hpp"
#include "modalx/verify.hpp"

namespace modalx::cli {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Non-finite doubles have no JSON literal.
ordered_json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

ordered_json input_entry(const std::string& path) {
  return {{"path", path}, {"fingerprint", fingerprint_hex(read_file(path))}};
}

std::vector<std::string> names_of(const Frame& f, const WorldSet& ws) {
  std::vector<std::string> out;
  for (auto w : ws) out.push_back(f.world(w));
  return out;
}

std::string cycles(const Frame& f, const Permutation& p) {
  std::string out;
  std::vector<bool> seen(p.degree(), false);
  for (WorldIndex w = 0; w < p.degree(); ++w) {
    if (seen[w] || p(w) == w) continue;
    out += "(";
    for (WorldIndex x = w; !seen[x]; x = p(x)) {
      seen[x] = true;
      if (x != w) out += " ";
      out += f.world(x);
    }
    out += ")";
  }
  return out.empty() ? "()" : out;
}

ordered_json report_json(const TestReport& r) {
  ordered_json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["statistic"] = number(r.statistic);
  j["null_distribution"] = r.null_distribution;
  j["p_value"] = number(r.p_value);
  j["deviation"] = number(r.deviation);
  j["threshold"] = number(r.threshold);
  j["sample_size"] = r.sample_size;
  j["seed"] = r.seed;
  j["notes"] = r.notes;
  auto comps = ordered_json::array();
  for (const auto& c : r.components)
    comps.push_back({{"label", c.label},
                     {"statistic", number(c.statistic)},
                     {"df", number(c.df)},
                     {"p_value", number(c.p_value)},
                     {"method", c.method},
                     {"categories", c.categories},
                     {"tuples", c.tuples}});
  j["components"] = comps;
  return j;
}

// Flattens a JSON document into `key.path: value` lines, or `key.path,value`
// CSV rows when `csv` is set.
void text_lines(const ordered_json& j, const std::string& prefix, std::ostream& out, bool csv) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) text_lines(v, prefix.empty() ? k : prefix + "." + k, out, csv);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i)
      text_lines(j[i], prefix + "[" + std::to_string(i) + "]", out, csv);
  } else if (csv) {
    std::string value = j.is_string() ? j.get<std::string>() : j.dump();
    if (value.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : value) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      value = quoted + "\"";
    }
    out << prefix << "," << value << "\n";
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

struct Common {
  std::string format = "json";
  std::string out_path;
  std::size_t enum_bound = kDefaultEnumerationBound;
  std::size_t max_exact_worlds = 12;
};

void emit(const ordered_json& doc, const Common& c, std::ostream& out) {
  std::ostringstream text;
  if (c.format == "csv") {
    text << "key,value\n";
    text_lines(doc, "", text, true);
  } else if (c.format == "text") {
    text_lines(doc, "", text, false);
  } else {
    text << doc.dump(2) << "\n";
  }
  if (c.out_path.empty()) {
    out << text.str();
  } else {
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw Error("cannot write '" + c.out_path + "'");
    f << text.str();
  }
}

// Deterministic commands carry a null seed.
ordered_json header(const std::string& command, std::optional<std::uint64_t> seed = std::nullopt) {
  ordered_json j;
  j["tool"] = "modalx";
  j["version"] = MODALX_VERSION;
  j["command"] = command;
  j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  return j;
}

struct FrameContext {
  Frame frame;
  PermGroup group;
  OrbitPartition partition;
};

FrameContext frame_context(const std::string& path, const Common& c) {
  auto frame = load_frame(path);
  auto group = stabilizer(frame, {c.enum_bound});
  auto partition = cluster_orbits(frame, group);
  return {std::move(frame), std::move(group), std::move(partition)};
}

ordered_json partition_json(const FrameContext& ctx) {
  auto orbits = ordered_json::array();
  for (std::size_t b = 0; b < ctx.partition.size(); ++b)
    orbits.push_back({{"index", b},
                      {"size", ctx.partition.blocks[b].size()},
                      {"worlds", names_of(ctx.frame, ctx.partition.blocks[b])}});
  return orbits;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_check(const std::string& frame_path, const Common& c, std::ostream& out) {
  auto ctx = frame_context(frame_path, c);
  const auto cls = classify(ctx.frame);
  const auto cluster = accessible_cluster(ctx.frame, ctx.frame.designated());
  auto doc = header("check");
  doc["inputs"] = {{"frame", input_entry(frame_path)}};
  doc["frame"] = {{"name", ctx.frame.name()},
                  {"worlds", ctx.frame.size()},
                  {"designated", ctx.frame.world(ctx.frame.designated())}};
  doc["label"] = std::string(to_string(cls.label));
  doc["reflexive"] = cls.reflexive;
  doc["transitive"] = cls.transitive;
  doc["symmetric"] = cls.symmetric;
  doc["cluster"] = names_of(ctx.frame, cluster);
  doc["point_homogeneous"] = is_point_homogeneous(ctx.group, cluster, ctx.frame.designated());
  emit(doc, c, out);
  return kExitOk;
}

int cmd_orbits(const std::string& frame_path, const Common& c, std::ostream& out) {
  auto ctx = frame_context(frame_path, c);
  const auto cluster = accessible_cluster(ctx.frame, ctx.frame.designated());
  auto doc = header("orbits");
  doc["inputs"] = {{"frame", input_entry(frame_path)}};
  doc["automorphism_group_order"] = automorphism_group(ctx.frame, {c.enum_bound}).order_string();
  doc["stabilizer_order"] = ctx.group.order_string();
  auto gens = ordered_json::array();
  for (const auto& g : ctx.group.generators()) gens.push_back(cycles(ctx.frame, g));
  doc["generators"] = gens;
  doc["designated"] = ctx.frame.world(ctx.frame.designated());
  auto orbits = partition_json(ctx);
  for (std::size_t b = 0; b < ctx.partition.size(); ++b) {
    const auto ext = check_ext(ctx.group, ctx.partition.blocks[b], b, {c.enum_bound});
    orbits[b]["restricted_order"] = ext.restricted_order.str();
    orbits[b]["ext"] = ext.holds;
    if (!ext.reason.empty()) orbits[b]["ext_reason"] = ext.reason;
  }
  doc["orbits"] = orbits;
  doc["point_homogeneous"] = is_point_homogeneous(ctx.group, cluster, ctx.frame.designated());
  emit(doc, c, out);
  return kExitOk;
}

int cmd_decompose(const std::string& frame_path, const std::string& measure_path, std::size_t atoms,
                  double tolerance, const Common& c, std::ostream& out) {
  auto frame = load_frame(frame_path);
  check_exact_size(frame.size(), atoms, {c.max_exact_worlds, tolerance});
  auto group = stabilizer(frame, {c.enum_bound});
  const ValuationSpace space(frame.size(), atoms);
  ExactMeasure p = [&] {
    try {
      return read_measure_csv(measure_path, space);
    } catch (const ParseError& e) {
      throw ParseError(measure_path, e);
    }
  }();
  const auto inv = check_invariance_exact(p, group, tolerance);
  auto doc = header("decompose");
  doc["inputs"] = {{"frame", input_entry(frame_path)}, {"measure", input_entry(measure_path)}};
  doc["atoms"] = atoms;
  doc["stabilizer_order"] = group.order_string();
  doc["invariant"] = inv.invariant;
  doc["max_deviation"] = inv.max_deviation;
  if (!inv.invariant) {
    std::ostringstream msg;
    msg << "measure is not invariant under the stabilizer (max deviation " << inv.max_deviation << ")";
    throw Error(msg.str());
  }
  const auto dec = ergodic_decompose(p, group, tolerance);
  auto comps = ordered_json::array();
  for (const auto& comp : dec.components)
    comps.push_back({{"weight", comp.weight}, {"size", comp.support.size()}, {"support", comp.support}});
  doc["components"] = comps;
  doc["component_count"] = dec.components.size();
  doc["reconstruction_error"] = dec.reconstruct(space).distance_sup(p);
  emit(doc, c, out);
  return kExitOk;
}

struct SampleArgs {
  std::string spec_path;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string data_out;
};

int cmd_sample(const std::string& frame_path, const SampleArgs& a, const Common& c, std::ostream& out) {
  auto ctx = frame_context(frame_path, c);
  const auto spec = load_spec(a.spec_path);
  auto data = sample_replicates(spec, ctx.partition, a.n, a.seed);
  data.world_names = ctx.frame.worlds();
  if (a.data_out.empty()) throw Error("sample needs --out for the dataset file");
  write_dataset(data, a.data_out);
  auto doc = header("sample", a.seed);
  doc["inputs"] = {{"frame", input_entry(frame_path)}, {"spec", input_entry(a.spec_path)}};
  doc["replicates"] = a.n;
  doc["coupling"] = std::string(to_string(spec.coupling));
  doc["orbits"] = partition_json(ctx);
  doc["dataset"] = {{"path", a.data_out}, {"fingerprint", fingerprint_hex(dataset_csv(data))}};
  emit(doc, c, out);
  return kExitOk;
}

struct VerifyArgs {
  std::string spec_path;
  std::string data_path;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  std::string tests = "rigidity,exchangeability,invariance,pp,coupling";
  double alpha = 0.01;
  std::size_t m = 2;
  std::size_t pp_bins = 10;
  double pp_tolerance = 0.02;
  std::size_t pp_min_observations = 1000000;
  double coupling_tolerance = 0.02;
  std::string plot_dir;
};

void write_plot_data(const std::string& dir, const Dataset& data, const FrameContext& ctx,
                     const VerifyArgs& a) {
  std::filesystem::create_directories(dir);
  for (std::size_t b = 0; b < ctx.partition.size(); ++b)
    for (std::size_t l = 0; l < data.atoms(); ++l) {
      const auto est = estimate_directing(data, ctx.partition.blocks[b], l);
      std::ofstream h(std::filesystem::path(dir) / ("directing_orbit" + std::to_string(b) + "_atom" +
                                                    std::to_string(l) + ".csv"));
      h << "bin_lower,bin_upper,count\n";
      for (std::size_t i = 0; i < est.histogram.size(); ++i)
        h << est.bin_edges[i] << "," << est.bin_edges[i + 1] << "," << est.histogram[i] << "\n";
    }
  if (!data.has_latents()) return;
  for (std::size_t l = 0; l < data.atoms(); ++l) {
    std::vector<CalibrationBin> bins;
    test_principal_principle(data, ctx.partition, l, {a.pp_bins, a.pp_tolerance, a.pp_min_observations}, &bins);
    std::ofstream cal(std::filesystem::path(dir) / ("calibration_atom" + std::to_string(l) + ".csv"));
    cal << "orbit,bin_lower,bin_upper,replicates,observations,mean_theta,frequency,evaluated\n";
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const auto& bin = bins[i];
      cal << i / a.pp_bins << "," << bin.lower << "," << bin.upper << "," << bin.replicates << ","
          << bin.observations << "," << bin.mean_theta << "," << bin.frequency << "," << (bin.evaluated ? 1 : 0)
          << "\n";
    }
  }
}

int cmd_verify(const std::string& frame_path, const VerifyArgs& a, const Common& c, std::ostream& out) {
  if (!(a.alpha > 0 && a.alpha < 1)) throw Error("--alpha must lie in (0, 1)");
  auto ctx = frame_context(frame_path, c);
  auto doc = header("verify", a.seed);
  ordered_json inputs = {{"frame", input_entry(frame_path)}};
  std::optional<HierarchicalSpec> spec;
  if (!a.spec_path.empty()) {
    spec = load_spec(a.spec_path);
    inputs["spec"] = input_entry(a.spec_path);
  }
  Dataset data;
  if (!a.data_path.empty()) {
    data = read_dataset(a.data_path);
    if (data.worlds() != ctx.frame.size()) throw Error("dataset world count does not match the frame");
    inputs["data"] = input_entry(a.data_path);
  } else {
    if (!spec) throw Error("verify needs --spec or --data");
    data = sample_replicates(*spec, ctx.partition, a.n, a.seed);
    data.world_names = ctx.frame.worlds();
  }
  doc["inputs"] = inputs;
  doc["replicates"] = data.replicates();
  doc["alpha"] = a.alpha;
  doc["orbits"] = partition_json(ctx);

  TestOptions opt;
  opt.alpha = a.alpha;
  opt.seed = a.seed;
  auto reports = ordered_json::array();
  bool all_pass = true;
  for (const auto& name : split_list(a.tests)) {
    TestReport rep;
    if (name == "rigidity") {
      rep = test_rigidity(data, ctx.partition, opt);
    } else if (name == "exchangeability") {
      std::vector<ComponentResult> comps;
      std::vector<std::string> notes;
      for (std::size_t b = 0; b < ctx.partition.size(); ++b) {
        const auto& block = ctx.partition.blocks[b];
        if (block.size() < std::max<std::size_t>(a.m, 2)) continue;
        auto r = test_exchangeability(data, block, a.m, opt);
        for (auto& comp : r.components) comp.label = "orbit " + std::to_string(b) + ": " + comp.label;
        comps.insert(comps.end(), r.components.begin(), r.components.end());
        notes.insert(notes.end(), r.notes.begin(), r.notes.end());
      }
      rep = summarize_components("exchangeability", data.replicates(), opt, std::move(comps));
      rep.notes = std::move(notes);
      if (rep.components.empty()) rep.notes.push_back("no orbit large enough; vacuous pass");
    } else if (name == "invariance") {
      rep = test_invariance_mc(data, ctx.group.generators(), {}, opt);
    } else if (name == "pp") {
      if (!data.has_latents()) throw Error("the pp test needs recorded latents");
      rep.name = "principal_principle";
      rep.deviation = 0;
      for (std::size_t l = 0; l < data.atoms(); ++l) {
        auto r = test_principal_principle(data, ctx.partition, l, {a.pp_bins, a.pp_tolerance, a.pp_min_observations});
        for (auto& comp : r.components) comp.label = "atom " + std::to_string(l) + " " + comp.label;
        rep.components.insert(rep.components.end(), r.components.begin(), r.components.end());
        rep.notes.insert(rep.notes.end(), r.notes.begin(), r.notes.end());
        rep.deviation = std::max(rep.deviation, r.deviation);
        rep.null_distribution = r.null_distribution;
        rep.threshold = r.threshold;
      }
      rep.statistic = rep.deviation;
      rep.pass = rep.deviation <= a.pp_tolerance;
      rep.sample_size = data.replicates();
      rep.seed = a.seed;
    } else if (name == "coupling") {
      rep.name = "coupling";
      rep.sample_size = data.replicates();
      rep.seed = a.seed;
      const bool independent = spec && spec->coupling == Coupling::Independent;
      const double tol = std::max(a.coupling_tolerance, 4.0 / std::sqrt(static_cast<double>(data.replicates())));
      rep.threshold = tol;
      rep.null_distribution = independent ? "|r| <= threshold for every adjacent orbit pair"
                                          : "informational (coupling is not independent)";
      rep.deviation = 0;
      for (std::size_t b = 0; b + 1 < ctx.partition.size(); ++b) {
        auto r = cross_orbit_report(data, ctx.partition, b, b + 1, 0,
                                    independent ? CouplingExpectation::Uncorrelated : CouplingExpectation::None, tol);
        ComponentResult comp;
        comp.label = "orbits " + std::to_string(b) + "," + std::to_string(b + 1);
        comp.statistic = r.correlation;
        comp.p_value = std::numeric_limits<double>::quiet_NaN();
        comp.method = "Pearson r of within-replicate frequencies (means " + std::to_string(r.first.mean) + ", " +
                      std::to_string(r.second.mean) + ")";
        rep.components.push_back(comp);
        rep.notes.insert(rep.notes.end(), r.report.notes.begin(), r.report.notes.end());
        rep.deviation = std::max(rep.deviation, std::abs(r.correlation));
        rep.pass = rep.pass && r.report.pass;
      }
      rep.statistic = rep.deviation;
      if (ctx.partition.size() < 2) rep.notes.push_back("fewer than two orbits; nothing to correlate");
    } else {
      throw Error("unknown test '" + name + "'");
    }
    all_pass = all_pass && rep.pass;
    reports.push_back(report_json(rep));
  }
  doc["tests"] = reports;
  doc["pass"] = all_pass;
  if (!a.plot_dir.empty()) {
    write_plot_data(a.plot_dir, data, ctx, a);
    doc["plot_data"] = a.plot_dir;
  }
  emit(doc, c, out);
  return all_pass ? kExitOk : kExitTestFailure;
}

struct PosteriorArgs {
  std::string data_path;
  double a = 1.0, b = 1.0;
  std::string observe;
};

int cmd_posterior(const std::string& frame_path, const PosteriorArgs& p, const Common& c, std::ostream& out) {
  auto ctx = frame_context(frame_path, c);
  const auto data = read_dataset(p.data_path);
  if (data.worlds() != ctx.frame.size()) throw Error("dataset world count does not match the frame");
  std::vector<bool> mask;
  if (!p.observe.empty()) {
    mask.assign(ctx.frame.size(), false);
    for (const auto& name : split_list(p.observe)) {
      const auto w = ctx.frame.find_world(name);
      if (!w) throw Error("unknown world '" + name + "' in --observe");
      mask[*w] = true;
    }
  }
  const auto prior = PosteriorState::uniform_prior(ctx.partition.size(), data.atoms(), {p.a, p.b});
  const auto post = posterior_update(data, ctx.partition, prior, mask);
  auto doc = header("posterior", data.seed);
  doc["inputs"] = {{"frame", input_entry(frame_path)}, {"data", input_entry(p.data_path)}};
  doc["prior"] = {{"a", p.a}, {"b", p.b}};
  auto orbits = partition_json(ctx);
  for (std::size_t b = 0; b < ctx.partition.size(); ++b) {
    auto atoms = ordered_json::array();
    for (std::size_t l = 0; l < data.atoms(); ++l) {
      const auto& s = post.shapes[b][l];
      atoms.push_back({{"atom", l < data.atom_names.size() ? data.atom_names[l] : std::to_string(l)},
                       {"a", s.a},
                       {"b", s.b},
                       {"mean", s.a / (s.a + s.b)},
                       {"updated", !(s == prior.shapes[b][l])}});
    }
    orbits[b]["posterior"] = atoms;
  }
  doc["orbits"] = orbits;
  emit(doc, c, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"modalx: symmetry and modal exchangeability toolkit for finite Kripke frames", "modalx"};
  app.set_version_flag("--version", std::string(MODALX_VERSION));
  app.require_subcommand(1);
  Common common;
  bool json_flag = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "text", "csv"}));
    sub->add_flag("--json", json_flag, "Shorthand for --format json (the default)");
    sub->add_option("--report", common.out_path, "Write the report to a file instead of stdout");
    sub->add_option("--enum-bound", common.enum_bound, "Enumerate groups up to this order");
    sub->add_option("--max-exact-worlds", common.max_exact_worlds, "World cap for exact computations");
  };
  std::string frame_path;

  auto* check = app.add_subcommand("check", "Classify a frame and report its accessible cluster");
  check->add_option("frame", frame_path, "Frame file")->required();
  add_common(check);

  auto* orbits = app.add_subcommand("orbits", "Stabilizer, cluster orbits, (Ext) and point-homogeneity");
  orbits->add_option("frame", frame_path, "Frame file")->required();
  add_common(orbits);

  std::string measure_path;
  std::size_t atoms = 1;
  double tolerance = 1e-12;
  auto* decompose = app.add_subcommand("decompose", "Exact ergodic decomposition of an invariant measure");
  decompose->add_option("frame", frame_path, "Frame file")->required();
  decompose->add_option("--measure", measure_path, "Measure CSV (valuation_index,probability)")->required();
  decompose->add_option("--atoms", atoms, "Number of atoms k")->check(CLI::Range(1, 16));
  decompose->add_option("--tolerance", tolerance, "Invariance tolerance");
  add_common(decompose);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sample replicates from a hierarchical spec");
  sample->add_option("frame", frame_path, "Frame file")->required();
  sample->add_option("--spec", sa.spec_path, "Spec file")->required();
  sample->add_option("-n", sa.n, "Replicates")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sa.seed, "Seed");
  sample->add_option("--out", sa.data_out, "Dataset CSV to write")->required();
  add_common(sample);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run statistical checks on sampled or supplied data");
  verify->add_option("frame", frame_path, "Frame file")->required();
  verify->add_option("--spec", va.spec_path, "Spec file to sample from");
  verify->add_option("--data", va.data_path, "Dataset CSV to test instead of sampling");
  verify->add_option("-n", va.n, "Replicates")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed, "Seed");
  verify->add_option("--tests", va.tests, "Comma-separated: rigidity,exchangeability,invariance,pp,coupling");
  verify->add_option("--alpha", va.alpha, "Significance level");
  verify->add_option("--m", va.m, "Exchangeability tuple size")->check(CLI::Range(1, 3));
  verify->add_option("--pp-bins", va.pp_bins, "Calibration bins")->check(CLI::PositiveNumber);
  verify->add_option("--pp-tolerance", va.pp_tolerance, "Calibration tolerance");
  verify->add_option("--pp-min-observations", va.pp_min_observations, "Observations needed to score a bin");
  verify->add_option("--coupling-tolerance", va.coupling_tolerance, "Bound on |r| under independent coupling");
  verify->add_option("--emit-plot-data", va.plot_dir, "Directory for histogram and calibration CSVs");
  add_common(verify);

  PosteriorArgs pa;
  auto* posterior = app.add_subcommand("posterior", "Conjugate Beta posterior per orbit and atom");
  posterior->add_option("frame", frame_path, "Frame file")->required();
  posterior->add_option("--data", pa.data_path, "Dataset CSV")->required();
  posterior->add_option("--prior-a", pa.a, "Beta prior a")->check(CLI::PositiveNumber);
  posterior->add_option("--prior-b", pa.b, "Beta prior b")->check(CLI::PositiveNumber);
  posterior->add_option("--observe", pa.observe, "Comma-separated observed worlds (default: all)");
  add_common(posterior);

  std::vector<std::string> argv_store{"modalx"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    if (json_flag) common.format = "json";
    if (*check) return cmd_check(frame_path, common, out);
    if (*orbits) return cmd_orbits(frame_path, common, out);
    if (*decompose) return cmd_decompose(frame_path, measure_path, atoms, tolerance, common, out);
    if (*sample) return cmd_sample(frame_path, sa, common, out);
    if (*verify) return cmd_verify(frame_path, va, common, out);
    if (*posterior) return cmd_posterior(frame_path, pa, common, out);
  } catch (const Error& e) {
    err << "modalx: error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "modalx: error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace modalx::cli
