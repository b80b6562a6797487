#include "pfdde/wright.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pfdde/errors.hpp"

namespace pfdde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I(0.0, 1.0);

cplx wright_p(const WrightBranch& br) { return (1.0 - I * br.omega) / (1.0 + br.omega * br.omega); }

// K_m = J_m (s exp(-i m W2) - i)
cplx wright_K(const WrightBranch& br, cplx Jm, int m, double Omega2) {
    return Jm * (double(br.sign) * std::polar(1.0, -m * Omega2) - I);
}

double forced_l1(int N, double Omega1, double Omega2, const std::function<cplx(int)>& Jm) {
    const WrightBranch br = wright_branch(N);
    const cplx p = wright_p(br);
    const double beta = 0.5 * Omega1;
    double acc = 0.0;
    for (int m : {-1, 1}) acc += beta * beta * (p * wright_K(br, Jm(m), m, Omega2)).real();
    return 0.5 * acc;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

template <class F>
double guarded(F f) {
    try {
        return f();
    } catch (const PoleError&) {
        return nan();
    }
}

}  // namespace

WrightBranch wright_branch(int N) {
    if (N < 0) throw ValidationError("branch index N must be >= 0");
    WrightBranch br;
    br.N = N;
    br.omega = kPi / 2.0 + N * kPi;
    br.sign = N % 2 == 0 ? 1 : -1;
    br.a = -br.sign * br.omega;
    return br;
}

Model wright_model_at(double a, const FourierSeries& beta) {
    if (beta.dim() != 1) throw ValidationError("Wright forcing beta must be scalar");
    LinearPart L;
    L.delays = {0.0, 1.0};
    L.matrices = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Constant(1, 1, a)};
    std::optional<MultilinearStencil> B;
    if (!beta.empty()) {
        FourierSeries g = cplx(a) * beta;
        MultilinearStencil st;
        st.order = 2;
        st.terms.push_back({g, {{0.0, 0}, {1.0, 0}}, true});
        st.terms.push_back({g, {{1.0, 0}, {0.0, 0}}, true});
        B = st;
    }
    return Model(1, beta.max_mode() == 0 ? std::nullopt : beta.period(), std::move(L), B);
}

Model wright_model(int N, double Omega1, double Omega2) {
    if (!(Omega2 > 0.0)) throw ValidationError("Omega2 must be positive");
    const WrightBranch br = wright_branch(N);
    if (Omega1 == 0.0) return wright_model_at(br.a, FourierSeries(1, std::nullopt));
    const double T = 2.0 * kPi / Omega2;
    return wright_model_at(br.a, FourierSeries::scalar(T, {{-1, 0.5 * Omega1}, {1, 0.5 * Omega1}}));
}

Model wright_model_autonomous(int N, double beta) {
    return wright_model_at(wright_branch(N).a, FourierSeries::scalar(std::nullopt, {{0, beta}}));
}

CMat wright_dDelta_da(cplx z) { return CMat::Constant(1, 1, -std::exp(-z)); }

Model fold_model(double beta1, const FourierSeries& beta2) {
    if (beta2.dim() != 1) throw ValidationError("fold forcing beta2 must be scalar");
    if (std::abs(1.0 + beta1) < 1e-12)
        throw ValidationError("beta1 = -1: zero is a double root (Bogdanov-Takens point) and b has a pole");
    LinearPart L;
    L.delays = {0.0, 1.0};
    L.matrices = {Eigen::MatrixXd::Constant(1, 1, -beta1), Eigen::MatrixXd::Constant(1, 1, beta1)};
    MultilinearStencil st;
    st.order = 2;
    st.terms.push_back({cplx(2.0) * beta2, {{1.0, 0}, {1.0, 0}}, true});
    return Model(1, beta2.max_mode() == 0 ? std::nullopt : beta2.period(), std::move(L), st);
}

double fold_b_closed_form(double beta1, const FourierSeries& beta2) {
    return beta2.coeff(0)(0).real() / (1.0 + beta1);
}

double wright_w(int N, double x) {
    const WrightBranch br = wright_branch(N);
    // a^2 + 2 a x sin x + x^2 written as |Delta(ix)|^2, no cancellation near the pole
    const double re = br.a * std::cos(x), im = x + br.a * std::sin(x);
    return re * re + im * im;
}

cplx J(int N, double x) {
    const WrightBranch br = wright_branch(N);
    const double w = wright_w(N, x);
    if (std::abs(w) < 1e-18 * (br.a * br.a + x * x)) throw PoleError(x, w);
    return 2.0 * br.omega * cplx(br.a * std::sin(x) + x, -br.a * std::cos(x)) / w;
}

double l1_autonomous_paper(int N) {
    const WrightBranch br = wright_branch(N);
    return -(9.0 * br.sign + 13.0 * br.omega) / (5.0 * (1.0 + br.omega * br.omega));
}

double l1_autonomous_default(int N) {
    const WrightBranch br = wright_branch(N);
    return (br.sign - 3.0 * br.omega) / (5.0 * (1.0 + br.omega * br.omega));
}

double l1_forced_paper(int N, double Omega1, double Omega2) {
    const WrightBranch br = wright_branch(N);
    const double w = br.omega;
    const cplx Jm1 = J(N, 2.0 * w - Omega2) - 2.0 * J(N, -Omega2);
    const cplx Jp1 = J(N, 2.0 * w + Omega2) - 2.0 * J(N, Omega2);
    const cplx Js = Jm1 + Jp1;
    const double bracket = br.sign * std::cos(Omega2) * (Js.real() + w * Js.imag()) +
                           (1.0 - std::sin(Omega2)) * (Jm1.imag() - w * Jm1.real()) +
                           (1.0 + std::sin(Omega2)) * (Jp1.imag() - w * Jp1.real());
    return Omega1 / (4.0 * (1.0 + w * w)) * bracket;
}

double l1_forced_plain(int N, double Omega1, double Omega2) {
    const double w = wright_branch(N).omega;
    return forced_l1(N, Omega1, Omega2, [&](int m) {
        return J(N, 2.0 * w + m * Omega2) - 2.0 * J(N, m * Omega2);
    });
}

double l1_forced_default(int N, double Omega1, double Omega2) {
    const double w = wright_branch(N).omega;
    return forced_l1(N, Omega1, Omega2, [&](int m) { return J(N, 2.0 * w + m * Omega2); });
}

std::vector<double> strong_resonance_points(int N, int r_max, int s_max) {
    const double w = wright_branch(N).omega;
    std::vector<std::pair<double, double>> pts;  // (r/s, value) sorted by exact ratio
    for (int s = 1; s <= s_max; ++s)
        for (int r = 1; r <= r_max; ++r)
            if (std::gcd(r, s) == 1) pts.emplace_back(double(r) / s, w * r / s);
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (const auto& p : pts) out.push_back(p.second);
    return out;
}

std::vector<BifdiagRow> bifdiag(int N_max, int s_max, double Omega2_max, int samples, double Omega1) {
    if (samples < 2) throw ValidationError("bifdiag needs at least 2 samples per branch");
    std::vector<BifdiagRow> rows;
    for (int N = 0; N <= N_max; ++N) {
        const WrightBranch br = wright_branch(N);
        auto row = [&](double O2, const char* kind) {
            BifdiagRow r{N, br.omega, br.a, O2, kind, nan(), nan()};
            r.l1_paper = guarded([&] { return l1_forced_paper(N, Omega1, O2); });
            r.l1_default = guarded([&] { return l1_forced_default(N, Omega1, O2); });
            return r;
        };
        std::vector<BifdiagRow> branch;
        for (int k = 1; k <= samples; ++k) branch.push_back(row(Omega2_max * k / samples, "hopf"));
        for (double O2 : strong_resonance_points(N, 3, s_max))
            if (O2 <= Omega2_max) branch.push_back(row(O2, "strong_resonance"));
        if (br.omega <= Omega2_max) {
            BifdiagRow r{N, br.omega, br.a, br.omega, "pole", nan(), nan()};
            branch.push_back(r);
        }

        // sign changes of each variant on the sample grid, away from the pole
        for (int variant = 0; variant < 2; ++variant) {
            auto f = [&](double O2) {
                return variant == 0 ? l1_forced_paper(N, Omega1, O2) : l1_forced_default(N, Omega1, O2);
            };
            for (int k = 1; k < samples; ++k) {
                double x0 = Omega2_max * k / samples, x1 = Omega2_max * (k + 1) / samples;
                if (x0 <= br.omega && br.omega <= x1) continue;
                double f0 = guarded([&] { return f(x0); }), f1 = guarded([&] { return f(x1); });
                if (!std::isfinite(f0) || !std::isfinite(f1) || (f0 < 0) == (f1 < 0)) continue;
                for (int it = 0; it < 80; ++it) {
                    double xm = 0.5 * (x0 + x1), fm = f(xm);
                    if ((fm < 0) == (f0 < 0)) {
                        x0 = xm;
                        f0 = fm;
                    } else {
                        x1 = xm;
                    }
                }
                branch.push_back(row(0.5 * (x0 + x1), "generalized_hopf_candidate"));
            }
        }
        std::stable_sort(branch.begin(), branch.end(),
                         [](const BifdiagRow& a, const BifdiagRow& b) { return a.Omega2 < b.Omega2; });
        rows.insert(rows.end(), branch.begin(), branch.end());
    }
    return rows;
}

std::string bifdiag_csv(const std::vector<BifdiagRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "N,omega_N,a_N,Omega2,kind,l1_paper,l1_default\n";
    for (const auto& r : rows)
        os << r.N << ',' << r.omega << ',' << r.a << ',' << r.Omega2 << ',' << r.kind << ',' << r.l1_paper
           << ',' << r.l1_default << '\n';
    return os.str();
}

}  // namespace pfdde
