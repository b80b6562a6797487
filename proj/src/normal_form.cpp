#include "pfdde/normal_form.hpp"

#include <cmath>
#include <sstream>

#include "pfdde/errors.hpp"

namespace pfdde {

namespace {

constexpr cplx I(0.0, 1.0);

FourierSeries constant_series(const CVec& v, const Model& model) {
    return FourierSeries::constant(v, model.period());
}

void reject_flags(const ResonanceScan& scan, bool allow_zero_mode) {
    std::vector<int> modes;
    for (int m : scan.flagged)
        if (!(allow_zero_mode && m == 0)) modes.push_back(m);
    if (!modes.empty()) throw ResonantMode(scan.z, modes);
}

}  // namespace

const char* to_string(H11Source s) { return s == H11Source::conjugate ? "default" : "paper"; }

H11Source h11_source_from_string(const std::string& s) {
    if (s == "default" || s == "conjugate") return H11Source::conjugate;
    if (s == "paper" || s == "plain") return H11Source::plain;
    throw ValidationError("unknown variant '" + s + "' (expected default or paper)");
}

std::string ResonanceClass::label() const {
    if (kind == Kind::nonresonant) return "nonresonant";
    std::ostringstream os;
    os << r << ':' << s << (strong ? " strong" : " weak");
    return os.str();
}

ResonanceClass classify_resonance(double omega, double omega_T, long max_denominator, double eps_rat) {
    ResonanceClass rc;
    if (omega_T == 0.0 || omega == 0.0) return rc;
    rc.ratio = std::abs(omega_T / omega);
    RationalApprox a = best_rational(rc.ratio, max_denominator);
    rc.error = a.error;
    if (a.r > 0 && a.error < eps_rat) {
        rc.kind = ResonanceClass::Kind::resonant;
        rc.r = a.r;
        rc.s = a.s;
        rc.strong = a.r <= 3;
    }
    return rc;
}

FoldReport fold_coefficient(const Model& model, const EigenTripleOptions& opts) {
    if (!model.bilinear()) throw MissingStencil("fold coefficient needs a bilinear stencil");
    FoldReport rep;
    rep.triple = eigen_triple(model, 0.0, opts);
    const double h = model.max_delay();
    HistoryField phi(0.0, constant_series(rep.triple.q, model), h);
    FourierSeries p = constant_series(rep.triple.p, model);

    rep.g = eval_bilinear(*model.bilinear(), phi, phi);
    rep.b_raw = 0.5 * fs_pairing(p, rep.g);
    rep.b = rep.b_raw.real();
    rep.imag_leak = std::abs(rep.b_raw.imag());

    FourierSeries rhs = rep.g;
    rhs += constant_series(-2.0 * rep.b_raw * (delta_prime(model, 0.0) * rep.triple.q), model);
    rep.fsc_residual = std::abs(fsc_residual(p, rhs));
    return rep;
}

HopfReport hopf_coefficients(const Model& model, double omega, const HopfOptions& opts) {
    if (!model.bilinear()) throw MissingStencil("Hopf coefficient needs a bilinear stencil");
    if (omega == 0.0) throw ValidationError("Hopf frequency must be nonzero");
    HopfReport rep;
    rep.omega = omega;
    rep.h11 = opts.h11;
    const cplx iw = I * omega;
    const double h = model.max_delay();
    const auto& B = *model.bilinear();

    rep.triple = eigen_triple(model, iw, opts.triple);
    rep.resonance = classify_resonance(omega, model.forcing_frequency(), opts.max_denominator, opts.eps_rat);
    rep.scan_0 = resonance_scan(model, 0.0, opts.mode_cap, opts.solve);
    rep.scan_2iw = resonance_scan(model, 2.0 * iw, opts.mode_cap, opts.solve);
    rep.scan_iw = resonance_scan(model, iw, opts.mode_cap, opts.solve);
    reject_flags(rep.scan_0, false);
    reject_flags(rep.scan_2iw, false);
    reject_flags(rep.scan_iw, true);

    HistoryField phi(iw, constant_series(rep.triple.q, model), h);
    HistoryField phib = phi.conjugate();
    FourierSeries p = constant_series(rep.triple.p, model);

    FourierSeries g20 = eval_bilinear(B, phi, phi);
    FourierSeries h20 = solve_characteristic(model, 2.0 * iw, g20, opts.solve);
    rep.h20_residual = solve_residual(model, 2.0 * iw, h20, g20);
    rep.H20 = HistoryField(2.0 * iw, h20, h);

    FourierSeries g11 = opts.h11 == H11Source::conjugate ? eval_bilinear(B, phi, phib) : g20;
    FourierSeries h11 = solve_characteristic(model, 0.0, g11, opts.solve);
    rep.h11_residual = solve_residual(model, 0.0, h11, g11);
    rep.H11 = HistoryField(0.0, h11, h);

    FourierSeries rhs = eval_bilinear(B, phib, rep.H20);
    rhs += cplx(2.0) * eval_bilinear(B, phi, rep.H11);
    if (model.trilinear()) rhs += eval_trilinear(*model.trilinear(), phi, phi, phib);

    rep.c = 0.5 * fs_pairing(p, rhs);
    rep.l1 = rep.c.real() / std::abs(omega);

    FourierSeries fsc = rhs;
    fsc += constant_series(-2.0 * rep.c * (delta_prime(model, iw) * rep.triple.q), model);
    rep.fsc_residual = std::abs(fsc_residual(p, fsc));
    return rep;
}

}  // namespace pfdde
