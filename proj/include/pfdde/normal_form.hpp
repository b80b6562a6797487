#pragma once

#include <string>

#include "pfdde/charmatrix.hpp"
#include "pfdde/periodic_linops.hpp"

namespace pfdde {

struct FoldReport {
    EigenTriple triple;
    double b = 0.0;
    cplx b_raw;                // 1/2 <p, B(phi, phi)>_T before taking the real part
    double imag_leak = 0.0;    // |Im b_raw|
    double fsc_residual = 0.0; // |<p, B(phi,phi) - 2 b Delta'(0) q>_T|
    FourierSeries g;           // B(phi, phi)
};

/// Which right-hand side feeds the H11 solve.
enum class H11Source {
    conjugate,  // B(phi, conj(phi)), the xi xi-bar equation
    plain,      // B(phi, phi), the printed closed forms of the forced Wright example
};

const char* to_string(H11Source s);
H11Source h11_source_from_string(const std::string& s);

struct ResonanceClass {
    enum class Kind { nonresonant, resonant } kind = Kind::nonresonant;
    long r = 0;
    long s = 1;
    bool strong = false;
    double ratio = 0.0;  // omega_T / omega
    double error = 0.0;  // |ratio - r/s| of the best approximant found

    std::string label() const;
};

/// omega_T / omega vs. its best rational approximation r/s (s <= max_denominator).
ResonanceClass classify_resonance(double omega, double omega_T, long max_denominator = 100,
                                  double eps_rat = 1e-9);

struct HopfOptions {
    H11Source h11 = H11Source::conjugate;
    int mode_cap = 8;
    long max_denominator = 100;
    double eps_rat = 1e-9;
    SolveOptions solve;
    EigenTripleOptions triple;
};

struct HopfReport {
    double omega = 0.0;
    EigenTriple triple;
    HistoryField H20;
    HistoryField H11;
    cplx c;
    double l1 = 0.0;  // Re c / |omega|
    H11Source h11 = H11Source::conjugate;
    ResonanceClass resonance;
    ResonanceScan scan_iw, scan_2iw, scan_0;
    double fsc_residual = 0.0;  // |<p, rhs_21 - 2 c Delta'(i omega) q>_T|
    double h20_residual = 0.0;
    double h11_residual = 0.0;
};

/// b = 1/2 <p, B(phi, phi)>_T with phi = exp(0 theta) q.
FoldReport fold_coefficient(const Model& model, const EigenTripleOptions& opts = {});

/// c = 1/2 <p, C(phi,phi,phi-bar) + B(phi-bar, H20) + 2 B(phi, H11)>_T, l1 = Re c / |omega|.
/// Throws ResonantMode when any scan at i omega (m != 0), 2 i omega or 0 flags a mode.
HopfReport hopf_coefficients(const Model& model, double omega, const HopfOptions& opts = {});

}  // namespace pfdde
