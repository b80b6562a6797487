#pragma once

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pfdde {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Finitely supported Fourier series of a T-periodic C^d-valued function,
///   f(t) = sum_m c_m exp(i m omega_T t),  omega_T = 2 pi / T.
///
/// A series without a period is a constant; it may only carry mode 0 and it
/// combines with any periodic series. Row-valued series (adjoint profiles) use
/// the same storage; the pairing never conjugates.
class FourierSeries {
public:
    FourierSeries() = default;
    FourierSeries(Eigen::Index dim, std::optional<double> period);

    static FourierSeries constant(const CVec& value, std::optional<double> period = std::nullopt);
    static FourierSeries scalar(std::optional<double> period,
                                std::initializer_list<std::pair<int, cplx>> modes);

    Eigen::Index dim() const { return dim_; }
    const std::optional<double>& period() const { return period_; }
    /// 2 pi / T, or 0 for a constant series.
    double angular_frequency() const;
    bool empty() const { return modes_.empty(); }
    /// Largest |m| in the support (0 when empty).
    int max_mode() const;
    const std::map<int, CVec>& modes() const { return modes_; }

    /// Coefficient of mode m; zero vector when absent.
    CVec coeff(int m) const;
    void set(int m, CVec value);
    void accumulate(int m, const CVec& value);

    CVec operator()(double t) const;

    /// Series of t -> conj(f(t)): w_m = conj(c_{-m}).
    FourierSeries conjugate() const;
    /// c_{-m} == conj(c_m) for every m, within tol (absolute).
    bool is_real(double tol = 0.0) const;
    /// Scalar series of component i.
    FourierSeries component(Eigen::Index i) const;
    /// Same coefficients with a period attached (constant series only or same period).
    FourierSeries with_period(std::optional<double> period) const;
    double max_abs() const;

    FourierSeries& operator+=(const FourierSeries& other);
    FourierSeries& operator*=(cplx factor);

    friend bool operator==(const FourierSeries& a, const FourierSeries& b);

private:
    Eigen::Index dim_ = 0;
    std::optional<double> period_;
    std::map<int, CVec> modes_;
};

FourierSeries operator+(FourierSeries a, const FourierSeries& b);
FourierSeries operator*(cplx factor, FourierSeries a);

/// Period shared by two series; throws PeriodMismatch when both are periodic with different T.
std::optional<double> common_period(const std::optional<double>& a, const std::optional<double>& b);

/// Pointwise product of a scalar series with a vector series (coefficient convolution).
FourierSeries fs_multiply(const FourierSeries& scalar, const FourierSeries& b);

/// (1/T) int_0^T p(t) f(t) dt = sum_m p_m f_{-m}  (bilinear, no conjugation).
cplx fs_pairing(const FourierSeries& row, const FourierSeries& column);

}  // namespace pfdde
