#pragma once

#include <limits>
#include <map>
#include <vector>

#include "pfdde/charmatrix.hpp"
#include "pfdde/fourier.hpp"
#include "pfdde/model.hpp"

namespace pfdde {

/// u(t)(theta) = exp(z theta) v0(t + theta), theta in [-h, 0].
struct HistoryField {
    cplx z = 0.0;
    FourierSeries v0;
    double max_delay = std::numeric_limits<double>::infinity();

    HistoryField() = default;
    HistoryField(cplx z_, FourierSeries v0_, double h = std::numeric_limits<double>::infinity())
        : z(z_), v0(std::move(v0_)), max_delay(h) {}

    /// Pointwise value u(t)(theta).
    CVec operator()(double t, double theta) const;
    /// Base conj(z), profile modes conj(v0_{-m}).
    HistoryField conjugate() const;
};

/// Series of t -> u(t)(-tau): modes exp(-z tau) exp(-i m omega_T tau) v0_m.
FourierSeries history_eval(const HistoryField& u, double tau);

FourierSeries eval_bilinear(const MultilinearStencil& B, const HistoryField& u, const HistoryField& w);
FourierSeries eval_trilinear(const MultilinearStencil& C, const HistoryField& u, const HistoryField& w,
                             const HistoryField& x);
/// Order-agnostic evaluation; args.size() must equal the stencil order.
FourierSeries eval_stencil(const MultilinearStencil& S, const std::vector<const HistoryField*>& args);

/// epsilon_res = scale (1 + |z| + |m| omega_T)
double resonance_threshold(cplx z, int m, double omega_T, double scale = 1e-8);

struct SolveOptions {
    double res_scale = 1e-8;  // multiplies (1 + |z| + |m| omega_T)
};

/// q_m = Delta(z + i m omega_T)^{-1} f_m. Throws ResonantMode when a needed mode is near-singular.
FourierSeries solve_characteristic(const Model& model, cplx z, const FourierSeries& f,
                                   const SolveOptions& opts = {});
/// p_m = f_m Delta(z - i m omega_T)^{-1} for row-valued f (stored as columns).
FourierSeries solve_characteristic_adjoint(const Model& model, cplx z, const FourierSeries& f,
                                           const SolveOptions& opts = {});
/// Mode-wise Delta(z + i m omega_T) q_m.
FourierSeries apply_characteristic(const Model& model, cplx z, const FourierSeries& q);
/// Mode-wise p_m Delta(z - i m omega_T).
FourierSeries apply_characteristic_adjoint(const Model& model, cplx z, const FourierSeries& p);
/// max_m ||Delta(z + i m omega_T) q_m - f_m||.
double solve_residual(const Model& model, cplx z, const FourierSeries& q, const FourierSeries& f);

struct ResonanceScan {
    cplx z;
    int mode_cap = 0;
    std::map<int, double> margins;  // sigma_min(Delta(z + i m omega_T))
    std::vector<int> flagged;

    double min_margin() const;
};

/// Autonomous models have a single distinct mode (m = 0).
ResonanceScan resonance_scan(const Model& model, cplx z, int mode_cap, const SolveOptions& opts = {});

/// <p, w0>_T
cplx fsc_residual(const FourierSeries& p, const FourierSeries& w0);

/// sum_m p_m Delta'(lambda - i m omega_T) q_{-m}
cplx eigen_pairing_sum(const Model& model, cplx lambda, const FourierSeries& p, const FourierSeries& q);

struct RationalApprox {
    long r = 0;
    long s = 1;
    double error = 0.0;  // |x - r/s|
};

/// Closest r/s to x with s <= max_denominator (continued fractions).
RationalApprox best_rational(double x, long max_denominator);

}  // namespace pfdde
