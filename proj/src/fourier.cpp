#include "pfdde/fourier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pfdde/errors.hpp"

namespace pfdde {

NotARoot::NotARoot(std::complex<double> z_, double sigma, double thr)
    : NumericalError([&] {
          std::ostringstream os;
          os << "not a root: sigma_min(Delta(" << z_.real() << (z_.imag() < 0 ? "" : "+")
             << z_.imag() << "i)) = " << sigma << " exceeds " << thr;
          return os.str();
      }()),
      z(z_), sigma_min(sigma), threshold(thr) {}

ResonantMode::ResonantMode(std::complex<double> z_, std::vector<int> modes_)
    : NumericalError([&] {
          std::ostringstream os;
          os << "resonant mode(s) at z = " << z_.real() << (z_.imag() < 0 ? "" : "+") << z_.imag()
             << "i: m =";
          for (int m : modes_) os << ' ' << m;
          return os.str();
      }()),
      z(z_), modes(std::move(modes_)) {}

PoleError::PoleError(double x_, double w)
    : NumericalError("pole of J at x = " + std::to_string(x_) + " (w(x) = " + std::to_string(w) + ")"),
      x(x_), denominator(w) {}

RootCountMismatch::RootCountMismatch(int w, int l, std::vector<std::complex<double>> p)
    : NumericalError("argument principle counts " + std::to_string(w) + " roots but " +
                     std::to_string(l) + " were located"),
      winding(w), located(l), partial(std::move(p)) {}

FourierSeries::FourierSeries(Eigen::Index dim, std::optional<double> period)
    : dim_(dim), period_(period) {
    if (period_ && !(*period_ > 0.0))
        throw ValidationError("Fourier series period must be positive");
}

FourierSeries FourierSeries::constant(const CVec& value, std::optional<double> period) {
    FourierSeries s(value.size(), period);
    s.set(0, value);
    return s;
}

FourierSeries FourierSeries::scalar(std::optional<double> period,
                                    std::initializer_list<std::pair<int, cplx>> modes) {
    FourierSeries s(1, period);
    for (const auto& [m, c] : modes) s.accumulate(m, CVec::Constant(1, c));
    return s;
}

double FourierSeries::angular_frequency() const {
    return period_ ? 2.0 * std::numbers::pi / *period_ : 0.0;
}

int FourierSeries::max_mode() const {
    int mm = 0;
    for (const auto& [m, c] : modes_) mm = std::max(mm, std::abs(m));
    return mm;
}

CVec FourierSeries::coeff(int m) const {
    auto it = modes_.find(m);
    return it == modes_.end() ? CVec::Zero(dim_) : it->second;
}

void FourierSeries::set(int m, CVec value) {
    if (value.size() != dim_) throw ValidationError("Fourier coefficient has wrong dimension");
    if (m != 0 && !period_) throw ValidationError("constant series cannot carry mode " + std::to_string(m));
    modes_[m] = std::move(value);
}

void FourierSeries::accumulate(int m, const CVec& value) {
    auto it = modes_.find(m);
    if (it == modes_.end()) {
        set(m, value);
    } else {
        if (value.size() != dim_) throw ValidationError("Fourier coefficient has wrong dimension");
        it->second += value;
    }
}

CVec FourierSeries::operator()(double t) const {
    CVec out = CVec::Zero(dim_);
    const double w = angular_frequency();
    for (const auto& [m, c] : modes_) out += std::polar(1.0, m * w * t) * c;
    return out;
}

FourierSeries FourierSeries::conjugate() const {
    FourierSeries out(dim_, period_);
    for (const auto& [m, c] : modes_) out.modes_[-m] = c.conjugate();
    return out;
}

bool FourierSeries::is_real(double tol) const {
    for (const auto& [m, c] : modes_) {
        CVec partner = coeff(-m).conjugate();
        if ((c - partner).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

FourierSeries FourierSeries::component(Eigen::Index i) const {
    FourierSeries out(1, period_);
    for (const auto& [m, c] : modes_) out.modes_[m] = CVec::Constant(1, c(i));
    return out;
}

FourierSeries FourierSeries::with_period(std::optional<double> period) const {
    FourierSeries out(dim_, common_period(period_, period));
    out.modes_ = modes_;
    return out;
}

double FourierSeries::max_abs() const {
    double mx = 0.0;
    for (const auto& [m, c] : modes_)
        if (c.size() > 0) mx = std::max(mx, c.cwiseAbs().maxCoeff());
    return mx;
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
    if (dim_ != other.dim_) throw ValidationError("cannot add Fourier series of different dimension");
    period_ = common_period(period_, other.period_);
    for (const auto& [m, c] : other.modes_) accumulate(m, c);
    return *this;
}

FourierSeries& FourierSeries::operator*=(cplx factor) {
    for (auto& [m, c] : modes_) c *= factor;
    return *this;
}

bool operator==(const FourierSeries& a, const FourierSeries& b) {
    if (a.dim_ != b.dim_ || a.period_ != b.period_ || a.modes_.size() != b.modes_.size()) return false;
    auto ia = a.modes_.begin();
    for (auto ib = b.modes_.begin(); ib != b.modes_.end(); ++ia, ++ib)
        if (ia->first != ib->first || ia->second != ib->second) return false;
    return true;
}

FourierSeries operator+(FourierSeries a, const FourierSeries& b) {
    a += b;
    return a;
}

FourierSeries operator*(cplx factor, FourierSeries a) {
    a *= factor;
    return a;
}

std::optional<double> common_period(const std::optional<double>& a, const std::optional<double>& b) {
    if (!a) return b;
    if (!b) return a;
    if (std::abs(*a - *b) > 1e-12 * std::max(*a, *b))
        throw PeriodMismatch("period mismatch: " + std::to_string(*a) + " vs " + std::to_string(*b));
    return a;
}

FourierSeries fs_multiply(const FourierSeries& scalar, const FourierSeries& b) {
    if (scalar.dim() != 1) throw ValidationError("fs_multiply: first factor must be scalar-valued");
    FourierSeries out(b.dim(), common_period(scalar.period(), b.period()));
    for (const auto& [ma, ca] : scalar.modes())
        for (const auto& [mb, cb] : b.modes()) out.accumulate(ma + mb, ca(0) * cb);
    return out;
}

cplx fs_pairing(const FourierSeries& row, const FourierSeries& column) {
    if (row.dim() != column.dim()) throw ValidationError("fs_pairing: dimension mismatch");
    common_period(row.period(), column.period());
    cplx acc = 0.0;
    for (const auto& [m, p] : row.modes()) {
        auto it = column.modes().find(-m);
        if (it != column.modes().end()) acc += (p.transpose() * it->second).value();
    }
    return acc;
}

}  // namespace pfdde
