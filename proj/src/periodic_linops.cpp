#include "pfdde/periodic_linops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pfdde/errors.hpp"

namespace pfdde {

namespace {

constexpr cplx I(0.0, 1.0);

bool is_zero(const CVec& v) { return v.isZero(0.0); }

double sigma_min(const CMat& D) {
    Eigen::JacobiSVD<CMat> svd(D);
    return svd.singularValues()(D.rows() - 1);
}

std::optional<double> model_period_for(const Model& model, const FourierSeries& f) {
    return common_period(f.period(), model.period());
}

}  // namespace

CVec HistoryField::operator()(double t, double theta) const {
    return std::exp(z * theta) * v0(t + theta);
}

HistoryField HistoryField::conjugate() const {
    return HistoryField(std::conj(z), v0.conjugate(), max_delay);
}

FourierSeries history_eval(const HistoryField& u, double tau) {
    if (!(tau >= 0.0) || tau > u.max_delay)
        throw ValidationError("history_eval: delay " + std::to_string(tau) + " outside [0, h]");
    const double w = u.v0.angular_frequency();
    FourierSeries out(u.v0.dim(), u.v0.period());
    const cplx base = std::exp(-u.z * tau);
    for (const auto& [m, c] : u.v0.modes()) out.set(m, (base * std::polar(1.0, -m * w * tau)) * c);
    return out;
}

FourierSeries eval_stencil(const MultilinearStencil& S, const std::vector<const HistoryField*>& args) {
    if (static_cast<int>(args.size()) != S.order)
        throw ValidationError("stencil of order " + std::to_string(S.order) + " given " +
                              std::to_string(args.size()) + " arguments");
    std::optional<double> period;
    for (const auto* a : args) period = common_period(period, a->v0.period());
    const Eigen::Index n = S.terms.empty() ? args.front()->v0.dim() : S.terms.front().coeff.dim();
    FourierSeries out(n, period);
    for (const auto& term : S.terms) {
        FourierSeries prod = FourierSeries::scalar(std::nullopt, {{0, 1.0}});
        for (std::size_t k = 0; k < args.size(); ++k) {
            const auto& slot = term.slots[k];
            prod = fs_multiply(prod, history_eval(*args[k], slot.delay).component(slot.component));
        }
        out += fs_multiply(prod, term.coeff);
    }
    return out;
}

FourierSeries eval_bilinear(const MultilinearStencil& B, const HistoryField& u, const HistoryField& w) {
    if (B.order != 2) throw ValidationError("eval_bilinear needs an order-2 stencil");
    return eval_stencil(B, {&u, &w});
}

FourierSeries eval_trilinear(const MultilinearStencil& C, const HistoryField& u, const HistoryField& w,
                             const HistoryField& x) {
    if (C.order != 3) throw ValidationError("eval_trilinear needs an order-3 stencil");
    return eval_stencil(C, {&u, &w, &x});
}

double resonance_threshold(cplx z, int m, double omega_T, double scale) {
    return scale * (1.0 + std::abs(z) + std::abs(m) * omega_T);
}

FourierSeries solve_characteristic(const Model& model, cplx z, const FourierSeries& f,
                                   const SolveOptions& opts) {
    if (f.dim() != model.n()) throw ValidationError("solve_characteristic: dimension mismatch");
    FourierSeries q(f.dim(), model_period_for(model, f));
    const double wT = q.angular_frequency();
    std::vector<int> bad;
    for (const auto& [m, fm] : f.modes()) {
        if (is_zero(fm)) {
            q.set(m, fm);
            continue;
        }
        const cplx zm = z + I * (m * wT);
        CMat D = delta(model, zm);
        if (sigma_min(D) < resonance_threshold(z, m, wT, opts.res_scale)) {
            bad.push_back(m);
            continue;
        }
        q.set(m, D.partialPivLu().solve(fm));
    }
    if (!bad.empty()) throw ResonantMode(z, bad);
    return q;
}

FourierSeries solve_characteristic_adjoint(const Model& model, cplx z, const FourierSeries& f,
                                           const SolveOptions& opts) {
    if (f.dim() != model.n()) throw ValidationError("solve_characteristic_adjoint: dimension mismatch");
    FourierSeries p(f.dim(), model_period_for(model, f));
    const double wT = p.angular_frequency();
    std::vector<int> bad;
    for (const auto& [m, fm] : f.modes()) {
        if (is_zero(fm)) {
            p.set(m, fm);
            continue;
        }
        const cplx zm = z - I * (m * wT);
        CMat D = delta(model, zm);
        if (sigma_min(D) < resonance_threshold(z, m, wT, opts.res_scale)) {
            bad.push_back(m);
            continue;
        }
        CMat Dt = D.transpose();
        p.set(m, Dt.partialPivLu().solve(fm));
    }
    if (!bad.empty()) throw ResonantMode(z, bad);
    return p;
}

FourierSeries apply_characteristic(const Model& model, cplx z, const FourierSeries& q) {
    FourierSeries out(q.dim(), model_period_for(model, q));
    const double wT = out.angular_frequency();
    for (const auto& [m, qm] : q.modes()) out.set(m, delta(model, z + I * (m * wT)) * qm);
    return out;
}

FourierSeries apply_characteristic_adjoint(const Model& model, cplx z, const FourierSeries& p) {
    FourierSeries out(p.dim(), model_period_for(model, p));
    const double wT = out.angular_frequency();
    for (const auto& [m, pm] : p.modes()) out.set(m, delta(model, z - I * (m * wT)).transpose() * pm);
    return out;
}

double solve_residual(const Model& model, cplx z, const FourierSeries& q, const FourierSeries& f) {
    FourierSeries r = apply_characteristic(model, z, q);
    r += cplx(-1.0) * f;
    double worst = 0.0;
    for (const auto& [m, c] : r.modes()) worst = std::max(worst, c.norm());
    return worst;
}

double ResonanceScan::min_margin() const {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& [m, s] : margins) mn = std::min(mn, s);
    return mn;
}

ResonanceScan resonance_scan(const Model& model, cplx z, int mode_cap, const SolveOptions& opts) {
    ResonanceScan scan;
    scan.z = z;
    scan.mode_cap = std::max(0, mode_cap);
    const double wT = model.forcing_frequency();
    const int cap = model.autonomous() ? 0 : scan.mode_cap;
    for (int m = -cap; m <= cap; ++m) {
        double s = sigma_min(delta(model, z + I * (m * wT)));
        scan.margins[m] = s;
        if (s < resonance_threshold(z, m, wT, opts.res_scale)) scan.flagged.push_back(m);
    }
    return scan;
}

cplx fsc_residual(const FourierSeries& p, const FourierSeries& w0) { return fs_pairing(p, w0); }

cplx eigen_pairing_sum(const Model& model, cplx lambda, const FourierSeries& p, const FourierSeries& q) {
    const auto period = common_period(common_period(p.period(), q.period()), model.period());
    const double wT = period ? 2.0 * std::numbers::pi / *period : 0.0;
    cplx acc = 0.0;
    for (const auto& [m, pm] : p.modes()) {
        auto it = q.modes().find(-m);
        if (it == q.modes().end()) continue;
        acc += (pm.transpose() * delta_prime(model, lambda - I * (m * wT)) * it->second).value();
    }
    return acc;
}

RationalApprox best_rational(double x, long max_denominator) {
    if (max_denominator < 1) max_denominator = 1;
    const double sign = x < 0 ? -1.0 : 1.0;
    const double ax = std::abs(x);
    long h2 = 0, h1 = 1, k2 = 1, k1 = 0;
    double y = ax;
    RationalApprox best{static_cast<long>(std::lround(ax)), 1, std::abs(ax - std::round(ax))};
    for (int iter = 0; iter < 64; ++iter) {
        double a_d = std::floor(y);
        if (a_d > 1e15) break;
        long a = static_cast<long>(a_d);
        long h = a * h1 + h2;
        long k = a * k1 + k2;
        if (k > max_denominator) {
            long t = (max_denominator - k2) / k1;
            long hs = t * h1 + h2, ks = t * k1 + k2;
            double es = std::abs(ax - double(hs) / double(ks));
            if (ks >= 1 && es < best.error) best = {hs, ks, es};
            break;
        }
        double e = std::abs(ax - double(h) / double(k));
        if (e <= best.error || k == 1) best = {h, k, e};
        h2 = h1; h1 = h; k2 = k1; k1 = k;
        double frac = y - a_d;
        if (frac < 1e-15) break;
        y = 1.0 / frac;
    }
    best.r = static_cast<long>(sign) * best.r;
    return best;
}

}  // namespace pfdde
