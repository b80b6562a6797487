#include "pfdde/report_io.hpp"

#include "pfdde/errors.hpp"
#include "pfdde/model_io.hpp"

namespace pfdde {

using nlohmann::json;

namespace {

json cvec_to_json(const CVec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

json field_to_json(const HistoryField& u) {
    return {{"z", complex_to_json(u.z)}, {"profile", vector_series_to_json(u.v0)}};
}

}  // namespace

json triple_to_json(const EigenTriple& t, const Model& model) {
    return {{"lambda", complex_to_json(t.lambda)},
            {"q", cvec_to_json(t.q)},
            {"p", cvec_to_json(t.p)},
            {"normalization", complex_to_json(t.normalization(model))},
            {"right_residual", t.right_residual(model)},
            {"left_residual", t.left_residual(model)},
            {"sigma_min", t.sigma_min},
            {"sigma_second", std::isfinite(t.sigma_second) ? json(t.sigma_second) : json(nullptr)}};
}

json scan_to_json(const ResonanceScan& scan) {
    json margins = json::array();
    for (const auto& [m, s] : scan.margins) margins.push_back(json::array({m, s}));
    return {{"z", complex_to_json(scan.z)},
            {"mode_cap", scan.mode_cap},
            {"min_margin", scan.min_margin()},
            {"margins", margins},
            {"flagged", scan.flagged}};
}

json resonance_to_json(const ResonanceClass& rc) {
    json j = {{"kind", rc.kind == ResonanceClass::Kind::nonresonant ? "nonresonant" : "resonant"},
              {"ratio", rc.ratio},
              {"approximation_error", rc.error},
              {"label", rc.label()}};
    if (rc.kind == ResonanceClass::Kind::resonant) {
        j["r"] = rc.r;
        j["s"] = rc.s;
        j["strength"] = rc.strong ? "strong" : "weak";
    }
    return j;
}

json fold_report_to_json(const FoldReport& rep, const Model& model) {
    return {{"kind", "fold"},
            {"b", rep.b},
            {"b_raw", complex_to_json(rep.b_raw)},
            {"imag_leak", rep.imag_leak},
            {"fsc_residual", rep.fsc_residual},
            {"triple", triple_to_json(rep.triple, model)},
            {"B_phi_phi", vector_series_to_json(rep.g)}};
}

json hopf_report_to_json(const HopfReport& rep, const Model& model, const HopfOptions& opts) {
    return {{"kind", "hopf"},
            {"omega", rep.omega},
            {"c", complex_to_json(rep.c)},
            {"l1", rep.l1},
            {"variant", to_string(rep.h11)},
            {"triple", triple_to_json(rep.triple, model)},
            {"H20", field_to_json(rep.H20)},
            {"H11", field_to_json(rep.H11)},
            {"h20_residual", rep.h20_residual},
            {"h11_residual", rep.h11_residual},
            {"fsc_residual", rep.fsc_residual},
            {"resonance", resonance_to_json(rep.resonance)},
            {"scans", {{"i_omega", scan_to_json(rep.scan_iw)},
                       {"two_i_omega", scan_to_json(rep.scan_2iw)},
                       {"zero", scan_to_json(rep.scan_0)}}},
            {"tolerances", {{"mode_cap", opts.mode_cap},
                            {"res_scale", opts.solve.res_scale},
                            {"max_denominator", opts.max_denominator},
                            {"eps_rat", opts.eps_rat},
                            {"root_tol", opts.triple.root_tol},
                            {"simple_tol", opts.triple.simple_tol}}}};
}

json strobe_to_json(const StrobeResult& res, const StrobeOptions& opts) {
    return {{"verdict", to_string(res.verdict)},
            {"amplitude", res.amplitude},
            {"half_range", res.half_range},
            {"drift", res.drift},
            {"envelope", res.envelope},
            {"samples", res.samples.size()},
            {"thresholds", {{"eps_dec", opts.eps_dec},
                            {"eps_cyc", opts.eps_cyc},
                            {"eps_env", opts.eps_env},
                            {"envelope_periods", opts.envelope_periods}}}};
}

json error_to_json(const std::exception& e) {
    json j = {{"error", "Error"}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const Error*>(&e)) j["error"] = pe->tag();
    if (const auto* rm = dynamic_cast<const ResonantMode*>(&e)) {
        j["z"] = complex_to_json(rm->z);
        j["modes"] = rm->modes;
    }
    if (const auto* pole = dynamic_cast<const PoleError*>(&e)) j["x"] = pole->x;
    if (const auto* nr = dynamic_cast<const NotARoot*>(&e)) {
        j["z"] = complex_to_json(nr->z);
        j["sigma_min"] = nr->sigma_min;
    }
    if (const auto* mm = dynamic_cast<const RootCountMismatch*>(&e)) {
        j["winding"] = mm->winding;
        j["located"] = mm->located;
        json partial = json::array();
        for (auto z : mm->partial) partial.push_back(complex_to_json(z));
        j["partial"] = partial;
    }
    return j;
}

}  // namespace pfdde
