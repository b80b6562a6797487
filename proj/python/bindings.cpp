#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pfdde/charmatrix.hpp"
#include "pfdde/errors.hpp"
#include "pfdde/integrator.hpp"
#include "pfdde/model_io.hpp"
#include "pfdde/normal_form.hpp"
#include "pfdde/periodic_linops.hpp"
#include "pfdde/report_io.hpp"
#include "pfdde/wright.hpp"

namespace py = pybind11;
using namespace pfdde;

namespace {

// {m: complex} for scalar series
FourierSeries series_from_dict(const std::map<int, cplx>& modes, std::optional<double> period) {
    FourierSeries s(1, period);
    for (const auto& [m, c] : modes) s.set(m, CVec::Constant(1, c));
    return s;
}

std::map<int, CVec> series_to_dict(const FourierSeries& s) { return s.modes(); }

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Normal form coefficients for periodically forced delay equations";

    auto base = py::register_exception<Error>(m, "Error");
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ResonantMode>(m, "ResonantMode", numerical.ptr());
    py::register_exception<PoleError>(m, "PoleError", numerical.ptr());
    py::register_exception<NotARoot>(m, "NotARoot", numerical.ptr());
    py::register_exception<NotSimple>(m, "NotSimple", numerical.ptr());
    py::register_exception<RootCountMismatch>(m, "RootCountMismatch", numerical.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", validation.ptr());

    py::class_<Model>(m, "Model")
        .def_property_readonly("n", &Model::n)
        .def_property_readonly("period", [](const Model& md) { return md.period(); })
        .def_property_readonly("autonomous", &Model::autonomous)
        .def_property_readonly("max_delay", &Model::max_delay)
        .def_property_readonly("delays", [](const Model& md) { return md.linear().delays; })
        .def_property_readonly("matrices", [](const Model& md) { return md.linear().matrices; })
        .def("to_json", [](const Model& md) { return serialize_model(md); })
        .def("__repr__", [](const Model& md) {
            return "<Model n=" + std::to_string(md.n()) + (md.autonomous() ? " autonomous>" : " periodic>");
        });

    m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"));
    m.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"));
    m.def("wright_model", &wright_model, py::arg("N"), py::arg("Omega1"), py::arg("Omega2"));
    m.def("wright_model_autonomous", &wright_model_autonomous, py::arg("N"), py::arg("beta") = 1.0);
    m.def(
        "wright_model_at",
        [](double a, const std::map<int, cplx>& beta, std::optional<double> period) {
            return wright_model_at(a, series_from_dict(beta, period));
        },
        py::arg("a"), py::arg("beta"), py::arg("period") = std::nullopt);
    m.def(
        "fold_model",
        [](double beta1, const std::map<int, cplx>& beta2, std::optional<double> period) {
            return fold_model(beta1, series_from_dict(beta2, period));
        },
        py::arg("beta1"), py::arg("beta2"), py::arg("period") = std::nullopt);

    m.def("delta", &delta, py::arg("model"), py::arg("z"));
    m.def("det_delta", &det_delta, py::arg("model"), py::arg("z"));
    m.def(
        "find_roots",
        [](const Model& md, std::array<double, 4> rect) {
            std::vector<std::pair<cplx, int>> out;
            for (const auto& r : find_roots(md, {rect[0], rect[1], rect[2], rect[3]}))
                out.emplace_back(r.lambda, r.multiplicity);
            return out;
        },
        py::arg("model"), py::arg("rect"), "Roots as (lambda, multiplicity), rect = (re_min, re_max, im_min, im_max)");
    m.def(
        "winding_number",
        [](const Model& md, std::array<double, 4> rect) {
            return winding_number(md, {rect[0], rect[1], rect[2], rect[3]});
        },
        py::arg("model"), py::arg("rect"));

    py::class_<EigenTriple>(m, "EigenTriple")
        .def_readonly("lam", &EigenTriple::lambda)
        .def_readonly("q", &EigenTriple::q)
        .def_readonly("p", &EigenTriple::p)
        .def_readonly("sigma_min", &EigenTriple::sigma_min)
        .def("normalization", &EigenTriple::normalization);
    m.def("eigen_triple", [](const Model& md, cplx lam) { return eigen_triple(md, lam); }, py::arg("model"),
          py::arg("lam"));

    m.def(
        "solve_characteristic",
        [](const Model& md, cplx z, const std::map<int, cplx>& f) {
            return series_to_dict(solve_characteristic(md, z, series_from_dict(f, md.period())));
        },
        py::arg("model"), py::arg("z"), py::arg("f"), "Scalar models: {m: f_m} -> {m: q_m}");
    m.def(
        "resonance_scan",
        [](const Model& md, cplx z, int mode_cap) { return resonance_scan(md, z, mode_cap).flagged; },
        py::arg("model"), py::arg("z"), py::arg("mode_cap") = 8);

    m.def(
        "fold_coefficient",
        [](const Model& md) {
            auto rep = fold_coefficient(md);
            return json_to_py(fold_report_to_json(rep, md));
        },
        py::arg("model"), "Report dict with key 'b'");
    m.def(
        "hopf_coefficients",
        [](const Model& md, double omega, const std::string& variant, int mode_cap) {
            HopfOptions opts;
            opts.h11 = h11_source_from_string(variant);
            opts.mode_cap = mode_cap;
            auto rep = hopf_coefficients(md, omega, opts);
            return json_to_py(hopf_report_to_json(rep, md, opts));
        },
        py::arg("model"), py::arg("omega"), py::arg("variant") = "default", py::arg("mode_cap") = 8,
        "Report dict with keys 'c', 'l1', ...; variant is 'default' or 'paper'");

    m.def("J", &J, py::arg("N"), py::arg("x"));
    m.def("l1_autonomous_paper", &l1_autonomous_paper, py::arg("N"));
    m.def("l1_autonomous_default", &l1_autonomous_default, py::arg("N"));
    m.def("l1_forced_paper", &l1_forced_paper, py::arg("N"), py::arg("Omega1"), py::arg("Omega2"));
    m.def("l1_forced_plain", &l1_forced_plain, py::arg("N"), py::arg("Omega1"), py::arg("Omega2"));
    m.def("l1_forced_default", &l1_forced_default, py::arg("N"), py::arg("Omega1"), py::arg("Omega2"));
    m.def(
        "bifdiag",
        [](int N_max, int s_max, double Omega2_max, int samples, double Omega1) {
            return bifdiag_csv(bifdiag(N_max, s_max, Omega2_max, samples, Omega1));
        },
        py::arg("N_max"), py::arg("s_max"), py::arg("Omega2_max"), py::arg("samples") = 40, py::arg("Omega1") = 1.0,
        "CSV text");

    m.def(
        "simulate",
        [](const Model& md, double t_end, double dt, double history, std::optional<double> strobe_period,
           double transient, std::optional<std::vector<double>> constant) {
            std::optional<RVec> c;
            if (constant) c = Eigen::Map<const RVec>(constant->data(), static_cast<Eigen::Index>(constant->size()));
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = integrate_dde(model_system(md, c), constant_history(RVec::Constant(md.n(), history)), 0.0,
                                   t_end, {dt, 1e6});
            }
            const double T = strobe_period ? *strobe_period : (md.period() ? *md.period() : 4.0);
            StrobeOptions opts;
            StrobeResult sr;
            if (tr.diverged)
                sr.verdict = Verdict::diverged;
            else
                sr = strobe(tr, T, 0.0, transient, opts);
            py::dict out = json_to_py(strobe_to_json(sr, opts));
            std::vector<double> t, x;
            for (std::size_t k = 0; k < tr.size(); ++k) {
                t.push_back(tr.t(k));
                x.push_back(tr.x[k](0));
            }
            out["t"] = t;
            out["x"] = x;
            return out;
        },
        py::arg("model"), py::arg("t_end"), py::arg("dt") = 0.01, py::arg("history") = 0.1,
        py::arg("strobe_period") = std::nullopt, py::arg("transient") = 0.0, py::arg("constant") = std::nullopt,
        "Integrates with a constant history; returns the strobe verdict plus t and the first component");
}
