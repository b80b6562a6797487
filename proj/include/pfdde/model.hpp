#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfdde/fourier.hpp"

namespace pfdde {

/// Point-mass delay kernel: L x_t = sum_j A_j x(t - tau_j).
struct LinearPart {
    std::vector<double> delays;             // sorted ascending, distinct
    std::vector<Eigen::MatrixXd> matrices;  // one n x n matrix per delay
    double max_delay = 0.0;                 // h
};

/// One multilinear argument: psi(-delay)[component].
struct Slot {
    double delay = 0.0;
    int component = 0;

    friend bool operator==(const Slot&, const Slot&) = default;
    friend bool operator<(const Slot& a, const Slot& b) {
        return a.delay < b.delay || (a.delay == b.delay && a.component < b.component);
    }
};

struct StencilTerm {
    FourierSeries coeff;      // C^n valued
    std::vector<Slot> slots;  // one per argument
    bool real = true;         // coefficient series satisfies c_{-m} = conj(c_m)
};

/// B(t; psi_1..psi_r)_i = sum_terms g(t)_i prod_k psi_k(-tau_k)[comp_k].
/// Holds the full derivative D^r F, not D^r F / r!.
struct MultilinearStencil {
    int order = 2;
    std::vector<StencilTerm> terms;

    bool empty() const { return terms.empty(); }
};

/// Average over argument-slot permutations. Already symmetric input is returned unchanged.
MultilinearStencil symmetrize(const MultilinearStencil& stencil);
bool is_symmetric(const MultilinearStencil& stencil);

class Model {
public:
    Model() = default;
    /// Validates and symmetrizes. A missing period means autonomous.
    Model(int n, std::optional<double> period, LinearPart linear,
          std::optional<MultilinearStencil> bilinear = std::nullopt,
          std::optional<MultilinearStencil> trilinear = std::nullopt,
          std::optional<Eigen::VectorXd> equilibrium = std::nullopt);

    int n() const { return n_; }
    const std::optional<double>& period() const { return period_; }
    bool autonomous() const { return !period_.has_value(); }
    /// 2 pi / T, zero when autonomous.
    double forcing_frequency() const;
    const LinearPart& linear() const { return linear_; }
    double max_delay() const { return linear_.max_delay; }
    const std::optional<MultilinearStencil>& bilinear() const { return bilinear_; }
    const std::optional<MultilinearStencil>& trilinear() const { return trilinear_; }
    const Eigen::VectorXd& equilibrium() const { return equilibrium_; }
    /// All stencil coefficients real-valued in time (c_{-m} = conj(c_m)).
    bool is_real() const { return real_; }

    /// Copy with the linear matrices replaced (same delays).
    Model with_matrices(std::vector<Eigen::MatrixXd> matrices) const;

private:
    int n_ = 0;
    std::optional<double> period_;
    LinearPart linear_;
    std::optional<MultilinearStencil> bilinear_;
    std::optional<MultilinearStencil> trilinear_;
    Eigen::VectorXd equilibrium_;
    bool real_ = true;
};

/// Relative tolerance used for the real-flag check c_{-m} == conj(c_m).
inline constexpr double kRealFlagTol = 1e-14;

}  // namespace pfdde
