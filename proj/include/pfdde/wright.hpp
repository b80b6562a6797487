#pragma once

#include <string>
#include <vector>

#include "pfdde/model.hpp"

namespace pfdde {

/// Hopf branch N of x'(t) = a x(t-1) [1 + beta(t) x(t)]: roots +-i omega_N at a = a_N.
struct WrightBranch {
    int N = 0;
    double omega = 0.0;  // pi/2 + N pi
    double a = 0.0;      // (-1)^{N+1} omega_N
    int sign = 1;        // (-1)^N
};

WrightBranch wright_branch(int N);

/// Wright model at parameter a with forcing series beta (scalar; constant series = autonomous).
Model wright_model_at(double a, const FourierSeries& beta);
/// Branch N with beta(t) = Omega1 cos(Omega2 t). Omega1 == 0 gives an autonomous model without B.
Model wright_model(int N, double Omega1, double Omega2);
/// Branch N with constant beta.
Model wright_model_autonomous(int N, double beta = 1.0);
/// d Delta / d a for the Wright linear part: -exp(-z).
CMat wright_dDelta_da(cplx z);

/// x'(t) = beta1 (x(t-1) - x(t)) + beta2(t) x(t-1)^2, fold at the origin. Rejects beta1 = -1.
Model fold_model(double beta1, const FourierSeries& beta2);
/// beta2-bar / (1 + beta1)
double fold_b_closed_form(double beta1, const FourierSeries& beta2);

/// w(x) = a_N^2 + 2 a_N x sin x + x^2 = |Delta(i x)|^2
double wright_w(int N, double x);
/// J(x) = 2 omega_N (a_N sin x + x - i a_N cos x) / w(x) = 2 i omega_N / Delta(i x).
/// Throws PoleError when w(x) is numerically zero.
cplx J(int N, double x);

/// Printed autonomous value -(9 (-1)^N + 13 omega_N) / (5 (1 + omega_N^2)).
double l1_autonomous_paper(int N);
/// Same pipeline with H11 driven by B(phi, conj phi): ((-1)^N - 3 omega_N) / (5 (1 + omega_N^2)).
double l1_autonomous_default(int N);

/// Printed forced formula, term by term as published.
double l1_forced_paper(int N, double Omega1, double Omega2);
/// 1/2 sum_{m=+-1} beta_{-m} beta_m Re(p K_m) with J_m = J(2w + m W2) - 2 J(m W2).
double l1_forced_plain(int N, double Omega1, double Omega2);
/// Same with J_m = J(2w + m W2).
double l1_forced_default(int N, double Omega1, double Omega2);

/// {omega_N r / s : 1 <= r <= r_max, 1 <= s <= s_max, gcd(r, s) = 1}, sorted ascending.
std::vector<double> strong_resonance_points(int N, int r_max, int s_max);

struct BifdiagRow {
    int N = 0;
    double omega = 0.0;
    double a = 0.0;
    double Omega2 = 0.0;
    std::string kind;  // hopf | strong_resonance | pole | generalized_hopf_candidate
    double l1_paper = 0.0;
    double l1_default = 0.0;
};

/// Branch data for N = 0..N_max: sampled hopf rows on (0, Omega2_max], strong resonance
/// points, the pole at Omega2 = omega_N, and refined sign changes of either l1 variant.
std::vector<BifdiagRow> bifdiag(int N_max, int s_max, double Omega2_max, int samples, double Omega1 = 1.0);
std::string bifdiag_csv(const std::vector<BifdiagRow>& rows);

}  // namespace pfdde
