#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "modalx/cli.hpp"
#include "modalx/error.hpp"
#include "modalx/measure.hpp"
#include "modalx/sampler.hpp"
#include "modalx/verify.hpp"

namespace py = pybind11;
using namespace modalx;

namespace {

std::vector<std::vector<std::string>> orbit_names(const Frame& f, const OrbitPartition& part) {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : part.blocks) {
    auto& names = out.emplace_back();
    for (auto w : b) names.push_back(f.world(w));
  }
  return out;
}

py::dict analyze(const Frame& f, std::size_t enum_bound) {
  const auto g = stabilizer(f, {enum_bound});
  const auto part = cluster_orbits(f, g);
  const auto cls = classify(f);
  const auto cluster = accessible_cluster(f, f.designated());
  std::vector<bool> ext;
  for (std::size_t b = 0; b < part.size(); ++b) ext.push_back(check_ext(g, part.blocks[b], b, {enum_bound}).holds);
  py::dict d;
  d["label"] = std::string(to_string(cls.label));
  d["reflexive"] = cls.reflexive;
  d["transitive"] = cls.transitive;
  d["symmetric"] = cls.symmetric;
  d["stabilizer_order"] = py::int_(py::str(g.order_string()));
  d["orbits"] = orbit_names(f, part);
  d["ext"] = ext;
  d["point_homogeneous"] = is_point_homogeneous(g, cluster, f.designated());
  return d;
}

OrbitPartition partition_of(const Frame& f) { return cluster_orbits(f, stabilizer(f)); }

py::tuple sample(const Frame& f, const std::string& spec_text, std::size_t n, std::uint64_t seed,
                 std::size_t threads) {
  const auto spec = parse_spec(spec_text);
  const auto part = partition_of(f);
  Dataset data = [&] {
    py::gil_scoped_release release;
    return sample_replicates(spec, part, n, seed, {threads});
  }();
  const std::size_t w = data.worlds(), width = data.layout().width;
  py::array_t<std::uint16_t> outcomes({n, w});
  py::array_t<double> latents({n, width});
  auto o = outcomes.mutable_unchecked<2>();
  auto l = latents.mutable_unchecked<2>();
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = data.outcomes_of(r);
    for (std::size_t i = 0; i < w; ++i) o(r, i) = row[i];
    const auto lat = data.latents_of(r);
    for (std::size_t i = 0; i < width; ++i) l(r, i) = lat[i];
  }
  return py::make_tuple(outcomes, latents);
}

py::array_t<double> exact_measure(const Frame& f, const std::string& spec_text, std::size_t max_worlds) {
  const auto spec = parse_spec(spec_text);
  const auto p = exact_hier_measure(spec, partition_of(f), {max_worlds});
  const auto& probs = p.probabilities();
  py::array_t<double> out(static_cast<py::ssize_t>(probs.size()));
  std::copy(probs.begin(), probs.end(), out.mutable_data());
  return out;
}

py::list decompose(const Frame& f, const std::vector<double>& probabilities, std::size_t atoms, double tolerance) {
  const auto g = stabilizer(f);
  const ExactMeasure p(ValuationSpace(f.size(), atoms), probabilities, 1e-9);
  const auto inv = check_invariance_exact(p, g, tolerance);
  if (!inv.invariant) throw Error("measure is not invariant under the stabilizer");
  py::list out;
  for (const auto& c : ergodic_decompose(p, g, tolerance).components) out.append(py::make_tuple(c.weight, c.support));
  return out;
}

py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symmetry analysis, exact measures and sampling on finite Kripke frames";
  // Later registrations are tried first, so the subclass goes last.
  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  py::class_<Frame>(m, "Frame")
      .def_static("parse", &parse_frame, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_frame(path); }, py::arg("path"))
      .def_property_readonly("name", &Frame::name)
      .def_property_readonly("worlds", &Frame::worlds)
      .def_property_readonly("designated", [](const Frame& f) { return f.world(f.designated()); })
      .def("related", [](const Frame& f, const std::string& a, const std::string& b) {
        const auto i = f.find_world(a), j = f.find_world(b);
        if (!i || !j) throw Error("unknown world");
        return f.related(*i, *j);
      })
      .def("serialize", &serialize_frame)
      .def("__len__", &Frame::size);

  m.def("analyze", &analyze, py::arg("frame"), py::arg("enum_bound") = kDefaultEnumerationBound,
        "Classification, stabilizer order, cluster orbits, (Ext) per orbit and point-homogeneity.");
  m.def("sample", &sample, py::arg("frame"), py::arg("spec"), py::arg("n"), py::arg("seed") = 0,
        py::arg("threads") = 0, "Replicate outcomes (n x worlds) and latent parameters (n x width).");
  m.def("exact_measure", &exact_measure, py::arg("frame"), py::arg("spec"), py::arg("max_worlds") = 12,
        "Exact law of the hierarchical model, indexed by valuation.");
  m.def("decompose", &decompose, py::arg("frame"), py::arg("probabilities"), py::arg("atoms") = 1,
        py::arg("tolerance") = 1e-12, "Ergodic components (weight, support) of an invariant measure.");
  m.def("run", &run, py::arg("args"), "Runs the command line; returns (exit code, stdout, stderr).");
  m.attr("__version__") = MODALX_VERSION;
}
