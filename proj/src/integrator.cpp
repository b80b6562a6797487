#include "pfdde/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pfdde/errors.hpp"
#include "pfdde/parallel.hpp"

namespace pfdde {

namespace {

struct RealCoeff {
    double omega = 0.0;
    std::vector<std::pair<int, CVec>> modes;

    RVec operator()(double t, Eigen::Index n) const {
        RVec out = RVec::Zero(n);
        for (const auto& [m, c] : modes) out += (std::polar(1.0, m * omega * t) * c).real();
        return out;
    }
};

struct CompiledTerm {
    RealCoeff g;
    std::vector<std::pair<int, int>> args;  // (lag index, component); lag index 0 = current state
    double weight = 1.0;
};

}  // namespace

InitialHistory constant_history(const RVec& value) {
    return [value](double) { return value; };
}

RVec Trajectory::operator()(double t) const {
    if (t <= t0) return history(t);
    const double s = (t - t0) / dt;
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9 * std::max(1.0, r)) {
        auto k = static_cast<std::size_t>(r);
        if (k >= x.size()) throw IntegrationError("history lookup beyond the integrated window");
        return x[k];
    }
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i + 1 >= x.size()) throw IntegrationError("history lookup beyond the integrated window");
    const double th = s - static_cast<double>(i);
    const double th2 = th * th, th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
    const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
    return h00 * x[i] + (h10 * dt) * dx[i] + h01 * x[i + 1] + (h11 * dt) * dx[i + 1];
}

std::string Trajectory::csv(std::size_t stride) const {
    std::ostringstream os;
    os.precision(12);
    os << 't';
    const Eigen::Index n = x.empty() ? 0 : x.front().size();
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
    os << '\n';
    for (std::size_t k = 0; k < x.size(); k += std::max<std::size_t>(1, stride)) {
        os << t(k);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << x[k](i);
        os << '\n';
    }
    return os.str();
}

Trajectory integrate_dde(const DdeSystem& sys, const InitialHistory& history, double t0, double t_end,
                         const IntegrateOptions& opts) {
    const double dt = opts.dt;
    if (!(dt > 0.0) || !std::isfinite(dt)) throw IntegrationError("dt must be positive");
    if (!(t_end > t0)) throw IntegrationError("t_end must exceed t0");
    if (!history) throw IntegrationError("initial history is empty");
    double h = 0.0;
    for (double lag : sys.lags) {
        if (!(lag > 0.0)) throw IntegrationError("lags must be positive");
        const double ratio = lag / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
            throw IntegrationError("dt = " + std::to_string(dt) + " does not divide delay " + std::to_string(lag));
        h = std::max(h, lag);
    }
    if (!sys.lags.empty() && dt > h / 4.0 * (1.0 + 1e-12))
        throw IntegrationError("dt must not exceed a quarter of the largest delay");

    Trajectory tr;
    tr.t0 = t0;
    tr.dt = dt;
    tr.history = history;
    const auto steps = static_cast<std::size_t>(std::llround((t_end - t0) / dt));
    tr.x.reserve(steps + 1);
    tr.dx.reserve(steps + 1);

    std::vector<RVec> lagged(sys.lags.size());
    RVec out(sys.n);
    auto f = [&](double t, const RVec& x) {
        for (std::size_t j = 0; j < sys.lags.size(); ++j) lagged[j] = tr(t - sys.lags[j]);
        out.setZero();
        sys.rhs(t, x, lagged, out);
        return out;
    };

    RVec x = history(t0);
    if (x.size() != sys.n) throw IntegrationError("initial history has the wrong dimension");
    tr.x.push_back(x);
    tr.dx.push_back(f(t0, x));
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = tr.t(k);
        const RVec& k1 = tr.dx[k];
        RVec k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
        RVec k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
        RVec k4 = f(t + dt, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opts.guard) {
            tr.diverged = true;
            break;
        }
        tr.x.push_back(x);
        tr.dx.push_back(f(tr.t(k + 1), x));
    }
    return tr;
}

DdeSystem model_system(const Model& model, const std::optional<RVec>& constant) {
    DdeSystem sys;
    sys.n = model.n();
    std::map<double, int> lag_index;
    auto note = [&](double tau) {
        if (tau != 0.0) lag_index.emplace(tau, 0);
    };
    const auto& L = model.linear();
    for (double tau : L.delays) note(tau);
    for (const auto* st : {&model.bilinear(), &model.trilinear()})
        if (*st)
            for (const auto& term : (*st)->terms)
                for (const auto& s : term.slots) note(s.delay);
    int next = 1;
    for (auto& [tau, idx] : lag_index) {
        idx = next++;
        sys.lags.push_back(tau);
    }
    auto lookup = [&](double tau) { return tau == 0.0 ? 0 : lag_index.at(tau); };

    std::vector<std::pair<int, Eigen::MatrixXd>> linear;
    for (std::size_t j = 0; j < L.delays.size(); ++j)
        if (!L.matrices[j].isZero(0.0)) linear.emplace_back(lookup(L.delays[j]), L.matrices[j]);

    std::vector<CompiledTerm> terms;
    for (const auto* st : {&model.bilinear(), &model.trilinear()}) {
        if (!*st) continue;
        const double weight = (*st)->order == 2 ? 0.5 : 1.0 / 6.0;
        for (const auto& term : (*st)->terms) {
            CompiledTerm ct;
            ct.g.omega = term.coeff.angular_frequency();
            for (const auto& [m, c] : term.coeff.modes()) ct.g.modes.emplace_back(m, c);
            for (const auto& s : term.slots) ct.args.emplace_back(lookup(s.delay), s.component);
            ct.weight = weight;
            terms.push_back(std::move(ct));
        }
    }
    RVec c0 = constant ? *constant : RVec::Zero(model.n());
    if (c0.size() != model.n()) throw ValidationError("constant term has the wrong dimension");
    const Eigen::Index n = model.n();

    sys.rhs = [linear, terms, c0, n](double t, const RVec& x, const std::vector<RVec>& lagged, RVec& dx) {
        auto state = [&](int idx) -> const RVec& { return idx == 0 ? x : lagged[static_cast<std::size_t>(idx - 1)]; };
        dx = c0;
        for (const auto& [idx, A] : linear) dx.noalias() += A * state(idx);
        for (const auto& term : terms) {
            double prod = term.weight;
            for (const auto& [idx, comp] : term.args) prod *= state(idx)(comp);
            if (prod != 0.0) dx += prod * term.g(t, n);
        }
    };
    return sys;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::decayed: return "decayed";
        case Verdict::converged: return "converged";
        case Verdict::diverged: return "diverged";
        case Verdict::undecided: return "undecided";
    }
    return "undecided";
}

std::string StrobeResult::csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "k,t";
    const Eigen::Index n = samples.empty() ? 0 : samples.front().x.size();
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
    os << '\n';
    for (const auto& s : samples) {
        os << s.k << ',' << s.t;
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << s.x(i);
        os << '\n';
    }
    return os.str();
}

StrobeResult strobe(const Trajectory& traj, double T, double s, double transient, const StrobeOptions& opts) {
    if (!(T > 0.0)) throw IntegrationError("strobe period must be positive");
    if (traj.size() < 2) throw IntegrationError("trajectory too short to strobe");
    StrobeResult res;
    const double t_end = traj.t_end();
    if (traj.diverged) {
        res.verdict = Verdict::diverged;
        res.amplitude = traj.x.back().cwiseAbs().maxCoeff();
        return res;
    }
    if (t_end < transient + 2.0 * T) throw IntegrationError("insufficient span: need transient + 2 periods");

    for (long k = static_cast<long>(std::ceil((transient - s) / T - 1e-9)); s + k * T <= t_end + 1e-9; ++k) {
        const double t = std::min(s + k * T, t_end);
        res.samples.push_back({static_cast<int>(k), t, traj(t)});
    }

    auto window = [&](double a, double b, double& sup, double& lo, double& hi) {
        sup = 0.0;
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        auto i0 = static_cast<std::size_t>(std::max(0.0, std::ceil((a - traj.t0) / traj.dt - 1e-9)));
        auto i1 = static_cast<std::size_t>(std::floor((b - traj.t0) / traj.dt + 1e-9));
        for (std::size_t i = i0; i <= std::min(i1, traj.size() - 1); ++i) {
            sup = std::max(sup, traj.x[i].cwiseAbs().maxCoeff());
            lo = std::min(lo, traj.x[i](opts.component));
            hi = std::max(hi, traj.x[i](opts.component));
        }
    };
    double lo = 0, hi = 0;
    window(t_end - T, t_end, res.amplitude, lo, hi);
    res.half_range = 0.5 * (hi - lo);
    if (res.samples.size() >= 2) {
        const RVec& a = res.samples[res.samples.size() - 2].x;
        const RVec& b = res.samples.back().x;
        res.drift = (b - a).cwiseAbs().maxCoeff() / std::max(res.amplitude, opts.eps_dec);
    }
    const double span = std::min(opts.envelope_periods * T, t_end - transient);
    double s1 = 0, s2 = 0;
    window(t_end - span, t_end - 0.5 * span, s1, lo, hi);
    window(t_end - 0.5 * span, t_end, s2, lo, hi);
    res.envelope = s2 > 0.0 ? std::abs(s2 - s1) / s2 : 0.0;

    if (res.amplitude < opts.eps_dec) {
        res.verdict = Verdict::decayed;
    } else if (res.drift < opts.eps_cyc || res.envelope < opts.eps_env) {
        res.verdict = Verdict::converged;
    } else {
        res.verdict = Verdict::undecided;
    }
    return res;
}

LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw ValidationError("fit needs matching nonempty samples");
    double sxx = 0, sxy = 0, ybar = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        ybar += y[i];
    }
    if (sxx == 0.0) throw ValidationError("fit through origin with all-zero abscissae");
    ybar /= static_cast<double>(y.size());
    LineFit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += std::pow(y[i] - fit.slope * x[i], 2);
        ss_tot += std::pow(y[i] - ybar, 2);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::vector<SweepPoint> amplitude_sweep(const std::function<DdeSystem(double)>& family,
                                        const std::vector<double>& params, const SweepConfig& cfg) {
    return parallel_map<SweepPoint>(
        params.size(),
        [&](std::size_t i) {
            DdeSystem sys = family(params[i]);
            InitialHistory hist = cfg.history ? cfg.history : constant_history(RVec::Constant(sys.n, 0.1));
            Trajectory tr = integrate_dde(sys, hist, 0.0, cfg.t_end, {cfg.dt, cfg.guard});
            StrobeResult st = strobe(tr, cfg.strobe_period, 0.0, cfg.transient, cfg.strobe);
            SweepPoint pt;
            pt.param = params[i];
            pt.verdict = st.verdict;
            pt.amplitude = st.verdict == Verdict::decayed ? 0.0 : st.half_range;
            return pt;
        },
        cfg.threads);
}

double estimate_re_c(double slope, cplx dlambda_dparam, double gain) {
    if (!std::isfinite(slope) || std::abs(slope) < 1e-300) throw NumericalError("degenerate amplitude slope");
    return -gain * gain * dlambda_dparam.real() / slope;
}

Trajectory integrate_normal_form(const NormalFormSpec& spec, cplx xi0, double t0, double t_end,
                                 const IntegrateOptions& opts) {
    DdeSystem sys;
    RVec init;
    if (spec.kind == NormalFormSpec::Kind::fold) {
        sys.n = 1;
        init = RVec::Constant(1, xi0.real());
        sys.rhs = [spec](double t, const RVec& x, const std::vector<RVec>&, RVec& dx) {
            const double xi = x(0);
            double extra = spec.N ? spec.N(t, xi).real() * xi * xi * xi : 0.0;
            dx(0) = spec.beta + spec.b * xi * xi + extra;
        };
    } else {
        sys.n = 2;
        init = RVec(2);
        init << xi0.real(), xi0.imag();
        sys.rhs = [spec](double t, const RVec& x, const std::vector<RVec>&, RVec& dx) {
            const cplx xi(x(0), x(1));
            const double r2 = std::norm(xi);
            cplx d = cplx(spec.beta, spec.omega) * xi + spec.c * xi * r2;
            if (spec.N) d += spec.N(t, xi) * r2 * r2;
            dx(0) = d.real();
            dx(1) = d.imag();
        };
    }
    Trajectory tr = integrate_dde(sys, constant_history(init), t0, t_end, opts);
    tr.label = spec.kind == NormalFormSpec::Kind::fold ? "fold normal form" : "hopf normal form";
    return tr;
}

}  // namespace pfdde
