#pragma once

// Brute-force argument principle: fixed dense sampling of the rectangle boundary.

#include <cmath>
#include <complex>
#include <numbers>

#include "pfdde/charmatrix.hpp"

namespace oracle {

inline int winding(const pfdde::Model& m, const pfdde::Rect& r, int points = 10000) {
    using cplx = std::complex<double>;
    const cplx corners[5] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max},
                             {r.re_min, r.im_max}, {r.re_min, r.im_min}};
    const int per_side = points / 4;
    double total = 0.0;
    cplx prev = pfdde::det_delta(m, corners[0]);
    for (int s = 0; s < 4; ++s)
        for (int k = 1; k <= per_side; ++k) {
            cplx z = corners[s] + (corners[s + 1] - corners[s]) * (double(k) / per_side);
            cplx cur = pfdde::det_delta(m, z);
            total += std::arg(cur / prev);
            prev = cur;
        }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace oracle
