#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfdde/model.hpp"

namespace pfdde {

using RVec = Eigen::VectorXd;

/// x'(t) = f(t, x(t), x(t - lag_1), ..., x(t - lag_k)) with positive lags.
struct DdeSystem {
    int n = 1;
    std::vector<double> lags;
    std::function<void(double t, const RVec& x, const std::vector<RVec>& lagged, RVec& dx)> rhs;
};

/// Initial function on [t0 - h, t0].
using InitialHistory = std::function<RVec(double t)>;
InitialHistory constant_history(const RVec& value);

struct IntegrateOptions {
    double dt = 0.01;
    double guard = 1e6;  // |x|_inf above this stops the run as diverged
};

class Trajectory {
public:
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<RVec> x;   // x(t0 + k dt)
    std::vector<RVec> dx;  // x'(t0 + k dt), Hermite slopes
    InitialHistory history;
    bool diverged = false;
    std::string label;

    std::size_t size() const { return x.size(); }
    double t(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return t(size() - 1); }
    /// Dense value: initial history before t0, cubic Hermite on stored steps.
    RVec operator()(double t) const;
    std::string csv(std::size_t stride = 1) const;
};

/// Fixed-step RK4 with cubic Hermite history. dt must divide every lag; dt <= h/4.
/// Throws IntegrationError on invalid step settings.
Trajectory integrate_dde(const DdeSystem& sys, const InitialHistory& history, double t0, double t_end,
                         const IntegrateOptions& opts = {});

/// Right-hand side constant + L x_t + B(x_t, x_t)/2 + C(x_t, x_t, x_t)/6 of a model,
/// in coordinates relative to the equilibrium.
DdeSystem model_system(const Model& model, const std::optional<RVec>& constant = std::nullopt);

enum class Verdict { decayed, converged, diverged, undecided };
const char* to_string(Verdict v);

struct StrobeOptions {
    double eps_dec = 1e-5;  // final-window sup below this: decayed
    double eps_cyc = 1e-6;  // relative strobe drift per period: T-periodic cycle
    double eps_env = 5e-3;  // relative change of the window sup between two halves: invariant torus
    int envelope_periods = 40;
    int component = 0;
};

struct StrobeSample {
    int k = 0;
    double t = 0.0;
    RVec x;
};

struct StrobeResult {
    std::vector<StrobeSample> samples;
    Verdict verdict = Verdict::undecided;
    double amplitude = 0.0;   // sup |x| over the final period
    double half_range = 0.0;  // (max - min) / 2 of the chosen component over the final period
    double drift = 0.0;       // relative distance of the last two strobe samples
    double envelope = 0.0;    // |S2 - S1| / S2 over the envelope window
    std::string csv() const;
};

/// Samples x(s + kT) for s + kT >= transient. Throws IntegrationError if the span is too short.
StrobeResult strobe(const Trajectory& traj, double T, double s, double transient, const StrobeOptions& opts = {});

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};
/// Least squares y = slope x.
LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

struct SweepConfig {
    double dt = 0.01;
    double t_end = 3000.0;
    double transient = 2000.0;
    double strobe_period = 4.0;
    InitialHistory history;
    StrobeOptions strobe;
    double guard = 1e6;
    int threads = 0;
};

struct SweepPoint {
    double param = 0.0;
    double amplitude = 0.0;  // half-range, zero when decayed
    Verdict verdict = Verdict::undecided;
};

/// One simulation per parameter value, run concurrently; rows follow the input order.
std::vector<SweepPoint> amplitude_sweep(const std::function<DdeSystem(double)>& family,
                                        const std::vector<double>& params, const SweepConfig& cfg);

/// Re c from the slope of amplitude^2 against the parameter offset:
///   Re c = -gain^2 Re(d lambda / d param) / slope, gain = observable amplitude per |xi|.
double estimate_re_c(double slope, cplx dlambda_dparam, double gain = 2.0);

struct NormalFormSpec {
    enum class Kind { fold, hopf } kind = Kind::hopf;
    double beta = 0.0;
    double b = 0.0;      // fold
    cplx c = -1.0;       // hopf
    double omega = 1.0;  // hopf
    /// higher-order term: fold adds N xi^3, hopf adds N |xi|^4
    std::function<cplx(double t, cplx xi)> N;
};

/// RK4 on the truncated normal form. The state is (xi) for fold and (Re xi, Im xi) for hopf.
Trajectory integrate_normal_form(const NormalFormSpec& spec, cplx xi0, double t0, double t_end,
                                 const IntegrateOptions& opts = {});

}  // namespace pfdde
