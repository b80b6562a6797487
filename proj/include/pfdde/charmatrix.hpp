#pragma once

#include <string>
#include <vector>

#include "pfdde/model.hpp"

namespace pfdde {

/// Delta(z) = z I - sum_j A_j exp(-z tau_j)
CMat delta(const Model& model, cplx z);
/// Delta'(z) = I + sum_j tau_j A_j exp(-z tau_j)
CMat delta_prime(const Model& model, cplx z);
cplx det_delta(const Model& model, cplx z);
/// d/dz det Delta(z) via Jacobi's formula.
cplx det_delta_derivative(const Model& model, cplx z);
/// Scale used by the relative thresholds: max(1, |z| + sum_j ||A_j|| |exp(-z tau_j)|).
double delta_scale(const Model& model, cplx z);

struct Rect {
    double re_min = 0, re_max = 0, im_min = 0, im_max = 0;

    bool contains(cplx z) const {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
    }
    bool degenerate() const { return !(re_max > re_min) || !(im_max > im_min); }
};

struct Root {
    cplx lambda;
    int multiplicity = 1;
    double residual = 0.0;  // |det Delta(lambda)|
};

struct RootFinderOptions {
    double tol = 1e-12;      // Newton step tolerance (relative to 1 + |z|)
    int max_refinements = 3; // grid halvings after a count mismatch
    int newton_iters = 60;
    double max_pitch = 0.5;
    int threads = 0;         // 0: hardware concurrency
};

using RootList = std::vector<Root>;

/// All roots of det Delta in the rectangle with multiplicities, sorted by (Re desc, Im asc).
/// Throws RootCountMismatch (carrying the located roots) when the boundary winding
/// number disagrees with the located multiplicity total.
RootList find_roots(const Model& model, const Rect& rect, const RootFinderOptions& opts = {});

/// Argument-principle winding number of det Delta around the rectangle boundary.
int winding_number(const Model& model, const Rect& rect, int min_points_per_side = 64);

std::string root_list_csv(const RootList& roots);

struct EigenTriple {
    cplx lambda;
    CVec q;  // right null vector
    CVec p;  // left null vector stored as a column: p^T Delta(lambda) = 0
    double sigma_min = 0.0;
    double sigma_second = 0.0;

    /// p^T Delta'(lambda) q
    cplx normalization(const Model& model) const;
    double right_residual(const Model& model) const;  // ||Delta q|| / ||q||
    double left_residual(const Model& model) const;   // ||p Delta|| / ||p||
};

struct EigenTripleOptions {
    double root_tol = 1e-8;    // sigma_min < root_tol * scale
    double simple_tol = 1e-4;  // sigma_second > simple_tol * scale
    double pairing_tol = 1e-8; // |p Delta' q| > pairing_tol before rescaling
};

/// Throws NotARoot / NotSimple.
EigenTriple eigen_triple(const Model& model, cplx lambda, const EigenTripleOptions& opts = {});

/// d lambda / d param = -p (d Delta / d param) q, for a normalized triple.
cplx root_sensitivity(const EigenTriple& triple, const CMat& dDelta_dparam);

}  // namespace pfdde
