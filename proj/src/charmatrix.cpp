#include "pfdde/charmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "pfdde/errors.hpp"
#include "pfdde/parallel.hpp"

namespace pfdde {

namespace {

constexpr double kPi = std::numbers::pi;

// Newton step for det Delta: det / det' = 1 / tr(Delta^{-1} Delta').
std::optional<cplx> newton_step(const Model& model, cplx z) {
    CMat D = delta(model, z);
    Eigen::PartialPivLU<CMat> lu(D);
    cplx det = lu.determinant();
    if (det == cplx(0.0)) return cplx(0.0);
    cplx tr = lu.solve(delta_prime(model, z)).trace();
    if (!std::isfinite(std::abs(tr)) || tr == cplx(0.0)) return std::nullopt;
    return 1.0 / tr;
}

std::optional<cplx> newton(const Model& model, cplx z, const RootFinderOptions& opts, double bound) {
    double last = 0.0;
    for (int it = 0; it < opts.newton_iters; ++it) {
        auto step = newton_step(model, z);
        if (!step) return std::nullopt;
        // damp wild steps so starts stay near the search region
        double len = std::abs(*step);
        if (len > bound) *step *= bound / len;
        z -= *step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        last = std::abs(*step);
        if (last < opts.tol * (1.0 + std::abs(z))) return z;
    }
    // multiple roots converge only linearly
    if (last < 1e-7 * (1.0 + std::abs(z))) return z;
    return std::nullopt;
}

double arg_increment(cplx a, cplx b) { return std::arg(b / a); }

// Winding of det Delta along the polyline z0 -> z1, adaptively bisected.
double segment_winding(const Model& model, cplx z0, cplx z1, cplx f0, cplx f1, int depth) {
    double d = arg_increment(f0, f1);
    if (std::abs(d) <= kPi / 3.0 || depth > 40) return d;
    cplx zm = 0.5 * (z0 + z1);
    cplx fm = det_delta(model, zm);
    if (fm == cplx(0.0)) return std::numeric_limits<double>::quiet_NaN();
    return segment_winding(model, z0, zm, f0, fm, depth + 1) +
           segment_winding(model, zm, z1, fm, f1, depth + 1);
}

double closed_winding(const Model& model, const std::vector<cplx>& pts) {
    std::vector<cplx> f(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        f[i] = det_delta(model, pts[i]);
        if (f[i] == cplx(0.0)) return std::numeric_limits<double>::quiet_NaN();
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::size_t j = (i + 1) % pts.size();
        total += segment_winding(model, pts[i], pts[j], f[i], f[j], 0);
    }
    return total / (2.0 * kPi);
}

std::vector<cplx> rect_boundary(const Rect& r, int per_side) {
    std::vector<cplx> pts;
    cplx corners[4] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}};
    for (int s = 0; s < 4; ++s) {
        cplx a = corners[s], b = corners[(s + 1) % 4];
        for (int k = 0; k < per_side; ++k) pts.push_back(a + (b - a) * (double(k) / per_side));
    }
    return pts;
}

int circle_winding(const Model& model, cplx c, double radius) {
    std::vector<cplx> pts;
    const int m = 64;
    for (int k = 0; k < m; ++k) pts.push_back(c + std::polar(radius, 2.0 * kPi * k / m));
    double w = closed_winding(model, pts);
    return std::isfinite(w) ? static_cast<int>(std::lround(w)) : 1;
}

double boundary_distance(const Rect& r, cplx z) {
    double dx = std::min(std::abs(z.real() - r.re_min), std::abs(z.real() - r.re_max));
    double dy = std::min(std::abs(z.imag() - r.im_min), std::abs(z.imag() - r.im_max));
    // distance to the boundary lines that the point's projection actually meets
    double d = std::numeric_limits<double>::infinity();
    if (z.imag() >= r.im_min && z.imag() <= r.im_max) d = std::min(d, dx);
    if (z.real() >= r.re_min && z.real() <= r.re_max) d = std::min(d, dy);
    return d;
}

Rect enlarge(const Rect& r, double by) {
    return {r.re_min - by, r.re_max + by, r.im_min - by, r.im_max + by};
}

RootList locate(const Model& model, const Rect& search, double pitch, const RootFinderOptions& opts) {
    const int nx = std::max(1, static_cast<int>(std::ceil((search.re_max - search.re_min) / pitch)));
    const int ny = std::max(1, static_cast<int>(std::ceil((search.im_max - search.im_min) / pitch)));
    const double hx = (search.re_max - search.re_min) / nx;
    const double hy = (search.im_max - search.im_min) / ny;
    const std::size_t count = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
    const double bound = 2.0 * pitch;
    auto found = parallel_map<std::optional<cplx>>(
        count,
        [&](std::size_t idx) {
            int i = static_cast<int>(idx % static_cast<std::size_t>(nx + 1));
            int j = static_cast<int>(idx / static_cast<std::size_t>(nx + 1));
            cplx z0(search.re_min + i * hx, search.im_min + j * hy);
            return newton(model, z0, opts, bound);
        },
        opts.threads);

    const Rect keep = enlarge(search, pitch);
    RootList roots;
    for (const auto& z : found) {
        if (!z || !keep.contains(*z)) continue;
        bool dup = std::any_of(roots.begin(), roots.end(), [&](const Root& r) {
            return std::abs(r.lambda - *z) < 1e-6 * (1.0 + std::abs(*z));
        });
        if (!dup) roots.push_back({*z, 1, 0.0});
    }
    return roots;
}

void enforce_conjugate_closure(RootList& roots) {
    for (auto& r : roots)
        if (std::abs(r.lambda.imag()) < 1e-12 * (1.0 + std::abs(r.lambda))) r.lambda.imag(0.0);
    const std::size_t initial = roots.size();
    for (std::size_t i = 0; i < initial; ++i) {
        cplx z = roots[i].lambda;
        if (z.imag() <= 0.0) continue;
        auto partner = std::find_if(roots.begin(), roots.end(), [&](const Root& r) {
            return std::abs(r.lambda - std::conj(z)) < 1e-6 * (1.0 + std::abs(z));
        });
        if (partner != roots.end()) {
            partner->lambda = std::conj(z);
        } else {
            roots.push_back({std::conj(z), roots[i].multiplicity, 0.0});
        }
    }
}

}  // namespace

CMat delta(const Model& model, cplx z) {
    const int n = model.n();
    CMat D = z * CMat::Identity(n, n);
    const auto& L = model.linear();
    for (std::size_t j = 0; j < L.delays.size(); ++j)
        D -= std::exp(-z * L.delays[j]) * L.matrices[j].cast<cplx>();
    return D;
}

CMat delta_prime(const Model& model, cplx z) {
    const int n = model.n();
    CMat D = CMat::Identity(n, n);
    const auto& L = model.linear();
    for (std::size_t j = 0; j < L.delays.size(); ++j)
        if (L.delays[j] != 0.0) D += (L.delays[j] * std::exp(-z * L.delays[j])) * L.matrices[j].cast<cplx>();
    return D;
}

cplx det_delta(const Model& model, cplx z) { return delta(model, z).determinant(); }

cplx det_delta_derivative(const Model& model, cplx z) {
    CMat D = delta(model, z);
    CMat Dp = delta_prime(model, z);
    // Jacobi: d det = sum_k det(D with column k replaced by D'_k)
    cplx acc = 0.0;
    for (Eigen::Index k = 0; k < D.cols(); ++k) {
        CMat M = D;
        M.col(k) = Dp.col(k);
        acc += M.determinant();
    }
    return acc;
}

double delta_scale(const Model& model, cplx z) {
    double s = std::abs(z);
    const auto& L = model.linear();
    for (std::size_t j = 0; j < L.delays.size(); ++j)
        s += L.matrices[j].norm() * std::exp(-z.real() * L.delays[j]);
    return std::max(1.0, s);
}

int winding_number(const Model& model, const Rect& rect, int min_points_per_side) {
    double w = closed_winding(model, rect_boundary(rect, min_points_per_side));
    if (!std::isfinite(w)) throw NumericalError("det Delta vanishes on the contour");
    return static_cast<int>(std::lround(w));
}

RootList find_roots(const Model& model, const Rect& rect, const RootFinderOptions& opts) {
    if (rect.degenerate()) return {};
    const double size = std::min(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
    double pitch = std::min(opts.max_pitch, size / 4.0);

    RootList roots;
    for (int attempt = 0;; ++attempt) {
        roots = locate(model, rect, pitch, opts);
        if (model.is_real()) enforce_conjugate_closure(roots);

        // move the contour off any root sitting on (or very near) the boundary
        Rect contour = rect;
        const double near = 1e-6 * (1.0 + size);
        for (int k = 0; k < 8; ++k) {
            bool clash = std::any_of(roots.begin(), roots.end(),
                                     [&](const Root& r) { return boundary_distance(contour, r.lambda) < near; });
            if (!clash) break;
            contour = enlarge(contour, 4.0 * near * (k + 1));
        }

        for (auto& r : roots) {
            double gap = 1e-3 * (1.0 + std::abs(r.lambda));
            for (const auto& o : roots)
                if (&o != &r) gap = std::min(gap, 0.4 * std::abs(o.lambda - r.lambda));
            r.multiplicity = std::max(1, circle_winding(model, r.lambda, gap));
            r.residual = std::abs(det_delta(model, r.lambda));
        }

        int winding = winding_number(model, contour);
        int located = 0;
        RootList inside;
        for (const auto& r : roots) {
            if (contour.contains(r.lambda)) located += r.multiplicity;
            if (rect.contains(r.lambda) || boundary_distance(rect, r.lambda) < near) inside.push_back(r);
        }
        std::sort(inside.begin(), inside.end(), [](const Root& a, const Root& b) {
            if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
            return a.lambda.imag() < b.lambda.imag();
        });
        if (winding == located) return inside;
        if (attempt >= opts.max_refinements) {
            std::vector<cplx> partial;
            for (const auto& r : inside) partial.push_back(r.lambda);
            throw RootCountMismatch(winding, located, partial);
        }
        pitch *= 0.5;
    }
}

std::string root_list_csv(const RootList& roots) {
    std::ostringstream os;
    os.precision(17);
    os << "re,im,multiplicity,residual\n";
    for (const auto& r : roots)
        os << r.lambda.real() << ',' << r.lambda.imag() << ',' << r.multiplicity << ',' << r.residual << '\n';
    return os.str();
}

cplx EigenTriple::normalization(const Model& model) const {
    return (p.transpose() * delta_prime(model, lambda) * q).value();
}

double EigenTriple::right_residual(const Model& model) const {
    return (delta(model, lambda) * q).norm() / q.norm();
}

double EigenTriple::left_residual(const Model& model) const {
    return (p.transpose() * delta(model, lambda)).norm() / p.norm();
}

EigenTriple eigen_triple(const Model& model, cplx lambda, const EigenTripleOptions& opts) {
    const int n = model.n();
    CMat D = delta(model, lambda);
    Eigen::JacobiSVD<CMat> svd(D, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double scale = delta_scale(model, lambda);
    EigenTriple t;
    t.lambda = lambda;
    t.sigma_min = s(n - 1);
    t.sigma_second = n >= 2 ? s(n - 2) : std::numeric_limits<double>::infinity();
    if (!(t.sigma_min < opts.root_tol * scale)) throw NotARoot(lambda, t.sigma_min, opts.root_tol * scale);
    if (t.sigma_second <= opts.simple_tol * scale)
        throw NotSimple("second singular value " + std::to_string(t.sigma_second) +
                        " too small: geometric multiplicity > 1");

    CVec q = svd.matrixV().col(n - 1);
    CVec p = svd.matrixU().col(n - 1).conjugate();

    double big = q.cwiseAbs().maxCoeff();
    Eigen::Index lead = 0;
    while (std::abs(q(lead)) < (1.0 - 1e-12) * big) ++lead;
    q *= std::abs(q(lead)) / q(lead);
    q(lead) = std::abs(q(lead));

    cplx pairing = (p.transpose() * delta_prime(model, lambda) * q).value();
    if (std::abs(pairing) <= opts.pairing_tol)
        throw NotSimple("p Delta' q vanishes: algebraic multiplicity > 1");
    p /= pairing;
    t.q = std::move(q);
    t.p = std::move(p);
    return t;
}

cplx root_sensitivity(const EigenTriple& triple, const CMat& dDelta_dparam) {
    return -(triple.p.transpose() * dDelta_dparam * triple.q).value();
}

}  // namespace pfdde
