#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bubblewalk/analysis.hpp"
#include "bubblewalk/graph.hpp"
#include "bubblewalk/group.hpp"
#include "bubblewalk/orbit.hpp"
#include "bubblewalk/wreath.hpp"
#include "bubblewalk/zline.hpp"

namespace py = pybind11;
using namespace bubblewalk;

namespace {

// Wreath elements cross the boundary in their text form "lamps=...;base=...".
std::string wreath_op(const ScalingRule& rule, const std::string& x, const std::string& y) {
  return format_wreath_element(
      wreath_multiply(rule, parse_wreath_element(rule, x), parse_wreath_element(rule, y)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bubblewalk core bindings";

  py::register_exception<LevelCapError>(m, "LevelCapError", PyExc_IndexError);
  py::register_exception<ResourceGuardError>(m, "ResourceGuardError", PyExc_RuntimeError);

  py::class_<ScalingRule>(m, "ScalingRule")
      .def(py::init([](const std::string& spec) { return ScalingRule::parse(spec); }), py::arg("spec"))
      .def_static("canonical", &ScalingRule::canonical)
      .def_static("geometric", &ScalingRule::geometric, py::arg("ratio"))
      .def_static("constant", &ScalingRule::constant, py::arg("c"))
      .def_static("explicit", &ScalingRule::explicit_list, py::arg("values"))
      .def("alpha", &ScalingRule::alpha, py::arg("k"))
      .def("s", &ScalingRule::s, py::arg("k"))
      .def_property_readonly("max_level", &ScalingRule::max_level)
      .def("__repr__", [](const ScalingRule& r) { return "ScalingRule('" + r.describe() + "')"; });

  py::class_<VertexAddress>(m, "Vertex")
      .def(py::init<>())
      .def_property_readonly("level", &VertexAddress::level)
      .def_property_readonly("path", &VertexAddress::path_string)
      .def_property_readonly("pos", &VertexAddress::pos)
      .def("__eq__", [](const VertexAddress& x, const VertexAddress& y) { return x == y; })
      .def("__lt__", [](const VertexAddress& x, const VertexAddress& y) { return x < y; })
      .def("__hash__", [](const VertexAddress& x) { return VertexHash{}(x); })
      .def("__str__", &format_address)
      .def("__repr__", [](const VertexAddress& x) { return "Vertex('" + format_address(x) + "')"; });

  m.def("parse_address", &parse_address, py::arg("rule"), py::arg("text"));
  m.def(
      "apply_word",
      [](const ScalingRule& rule, const VertexAddress& x, const std::string& w) {
        return apply_word(rule, x, parse_word(w));
      },
      py::arg("rule"), py::arg("x"), py::arg("word"));
  m.def("dist_to_root", &dist_to_root, py::arg("rule"), py::arg("x"));
  m.def("tree_distance", &tree_distance, py::arg("rule"), py::arg("x"), py::arg("y"));
  m.def("ball", &ball, py::arg("rule"), py::arg("center"), py::arg("r"),
        py::arg("limit") = kDefaultBallLimit);
  m.def("ball_count", &ball_count, py::arg("rule"), py::arg("r"));

  m.def("confine_prob_exact", [](std::int64_t n, std::int64_t mm) { return confine_prob_exact({n, mm}); },
        py::arg("n"), py::arg("m"));
  m.def("confine_rate", &confine_rate, py::arg("m"));

  m.def(
      "inverted_orbit",
      [](const ScalingRule& rule, const std::string& w) { return inverted_orbit_tracked(rule, parse_word(w), 1).points; },
      py::arg("rule"), py::arg("word"));
  m.def(
      "conditioned_orbit_stats",
      [](const ScalingRule& rule, std::int64_t n, std::int64_t mm, std::int64_t reps, const std::string& mode,
         std::uint64_t seed, unsigned threads) {
        ConditionOptions opt;
        if (mode == "exact")
          opt.mode = ConditionMode::exact;
        else if (mode != "rejection")
          throw std::invalid_argument("mode must be 'exact' or 'rejection'");
        opt.seed = seed;
        opt.threads = threads;
        auto r = conditioned_orbit_stats(rule, n, mm, reps, opt);
        py::dict d;
        d["accepted"] = r.accepted;
        d["acceptance_prob_exact"] = r.acceptance_prob_exact;
        d["max_orbit_radius_over_m"] = r.max_orbit_radius_over_m;
        d["max_displacement_over_m"] = r.max_displacement_over_m;
        d["empirical_K"] = r.empirical_K;
        d["subword_violations"] = r.subword_violations;
        d["deep_spot_violations"] = r.deep_spot_violations;
        return d;
      },
      py::arg("rule"), py::arg("n"), py::arg("m"), py::arg("reps"), py::arg("mode") = "exact",
      py::arg("seed") = 1, py::arg("threads") = 1);

  m.def(
      "elements_equal",
      [](const ScalingRule& rule, const std::string& w1, const std::string& w2) {
        return elements_equal(rule, parse_word(w1), parse_word(w2));
      },
      py::arg("rule"), py::arg("w1"), py::arg("w2"));
  m.def(
      "count_small_orbit_elements",
      [](const ScalingRule& rule, std::int64_t n, std::int64_t mm, double K, unsigned threads) {
        return count_small_orbit_elements(rule, n, mm, K, threads).distinct_elements;
      },
      py::arg("rule"), py::arg("n"), py::arg("m"), py::arg("K"), py::arg("threads") = 1);

  m.def("wreath_multiply", &wreath_op, py::arg("rule"), py::arg("x"), py::arg("y"));
  m.def(
      "wreath_inverse",
      [](const ScalingRule& rule, const std::string& x) {
        return format_wreath_element(wreath_inverse(rule, parse_wreath_element(rule, x)));
      },
      py::arg("rule"), py::arg("x"));
  m.def(
      "wreath_equal",
      [](const ScalingRule& rule, const std::string& x, const std::string& y) {
        return wreath_equal(rule, parse_wreath_element(rule, x), parse_wreath_element(rule, y));
      },
      py::arg("rule"), py::arg("x"), py::arg("y"));
  m.def(
      "deep_word", [](const ScalingRule& rule, int levels) { return format_word(deep_word(rule, levels)); },
      py::arg("rule"), py::arg("levels"));
  m.def(
      "simulate_sws",
      [](const ScalingRule& rule, std::int64_t n, std::uint64_t seed, const std::string& start) {
        Rng rng(seed);
        auto s = simulate_sws(rule, n, rng, parse_wreath_element(rule, start));
        py::dict d;
        d["final_support"] = s.final_support;
        d["toggles"] = s.toggles;
        d["returned_to_identity"] = s.returned_to_identity;
        d["walk"] = format_word(s.walk);
        d["support_size_trace"] = s.support_size_trace;
        d["final_lamps"] = std::vector<VertexAddress>(s.final_lamps.begin(), s.final_lamps.end());
        return d;
      },
      py::arg("rule"), py::arg("n"), py::arg("seed") = 1, py::arg("start") = "lamps=;base=");
  m.def(
      "harmonic_estimate",
      [](const ScalingRule& rule, const std::string& start, std::int64_t horizon, std::int64_t reps,
         std::uint64_t seed, unsigned threads) {
        auto h = harmonic_estimate(rule, parse_wreath_element(rule, start), horizon, reps, seed, threads);
        return py::make_tuple(h.p_hat, h.std_error);
      },
      py::arg("rule"), py::arg("start"), py::arg("horizon"), py::arg("reps"), py::arg("seed") = 1,
      py::arg("threads") = 1);

  m.def(
      "flow_energy",
      [](const ScalingRule& rule, int k_max) {
        auto e = flow_energy(rule, k_max);
        py::dict d;
        d["partial_sums"] = e.partial_sums;
        d["tail_exponent"] = e.tail_exponent;
        d["converges"] = e.converges;
        return d;
      },
      py::arg("rule"), py::arg("k_max"));
  m.def("kirchhoff_check", &kirchhoff_check, py::arg("rule"), py::arg("k_max"), py::arg("perturbation") = 0.0);
  m.def(
      "green_function_estimate",
      [](const ScalingRule& rule, std::int64_t n, std::int64_t reps, std::uint64_t seed, unsigned threads) {
        auto g = green_function_estimate(rule, n, reps, seed, threads);
        py::dict d;
        d["times"] = g.times;
        d["g"] = g.g;
        d["std_error"] = g.std_error;
        d["saturation"] = g.saturation();
        d["growth_ratio"] = g.growth_ratio();
        return d;
      },
      py::arg("rule"), py::arg("n"), py::arg("reps"), py::arg("seed") = 1, py::arg("threads") = 1);
  m.def(
      "volume_exponent_fit",
      [](const ScalingRule& rule, std::int64_t lo, std::int64_t hi, std::int64_t points) {
        return volume_exponent_fit(rule, log_spaced(lo, hi, points)).slope;
      },
      py::arg("rule"), py::arg("rmin"), py::arg("rmax"), py::arg("points") = 21);
  m.def(
      "bound_pipeline",
      [](const ScalingRule& rule, const std::vector<std::int64_t>& ns, double K, unsigned threads) {
        CountingConstants c;
        c.K = K;
        auto t = bound_pipeline(rule, ns, {}, c, threads);
        py::list rows;
        for (const auto& r : t.rows) rows.append(py::make_tuple(r.n, r.m_opt, r.log_bound));
        py::dict d;
        d["rows"] = rows;
        d["fitted_exponent"] = t.fitted_exponent;
        d["m_opt_exponent"] = t.m_opt_exponent;
        return d;
      },
      py::arg("rule"), py::arg("n_list"), py::arg("K") = 16.0, py::arg("threads") = 1);
}
