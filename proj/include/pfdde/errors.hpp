#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfdde {

/// Broad failure class; the CLI maps it onto its exit codes.
enum class ErrorCategory { validation, numerical, io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    /// Short machine-readable tag ("ResonantMode", "NotARoot", ...).
    virtual const char* tag() const noexcept { return "Error"; }

private:
    ErrorCategory category_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
    const char* tag() const noexcept override { return "ValidationError"; }
};

class PeriodMismatch : public ValidationError {
public:
    explicit PeriodMismatch(const std::string& what) : ValidationError(what) {}
    const char* tag() const noexcept override { return "PeriodMismatch"; }
};

class MissingStencil : public ValidationError {
public:
    explicit MissingStencil(const std::string& what) : ValidationError(what) {}
    const char* tag() const noexcept override { return "MissingStencil"; }
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
    const char* tag() const noexcept override { return "IoError"; }
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what)
        : Error(ErrorCategory::numerical, what) {}
    const char* tag() const noexcept override { return "NumericalError"; }
};

class NotARoot : public NumericalError {
public:
    NotARoot(std::complex<double> z, double sigma_min, double threshold);
    const char* tag() const noexcept override { return "NotARoot"; }

    std::complex<double> z;
    double sigma_min;
    double threshold;
};

class NotSimple : public NumericalError {
public:
    explicit NotSimple(const std::string& what) : NumericalError(what) {}
    const char* tag() const noexcept override { return "NotSimple"; }
};

/// Some Fourier mode hit a (near-)singular characteristic matrix Delta(z + i m omega_T).
class ResonantMode : public NumericalError {
public:
    ResonantMode(std::complex<double> z, std::vector<int> modes);
    const char* tag() const noexcept override { return "ResonantMode"; }

    std::complex<double> z;
    std::vector<int> modes;
};

class PoleError : public NumericalError {
public:
    PoleError(double x, double denominator);
    const char* tag() const noexcept override { return "PoleAtX"; }

    double x;
    double denominator;
};

/// Argument-principle count and located roots disagree after all refinements.
class RootCountMismatch : public NumericalError {
public:
    RootCountMismatch(int winding, int located, std::vector<std::complex<double>> partial);
    const char* tag() const noexcept override { return "RootCountMismatch"; }

    int winding;
    int located;
    std::vector<std::complex<double>> partial;
};

class IntegrationError : public ValidationError {
public:
    explicit IntegrationError(const std::string& what) : ValidationError(what) {}
    const char* tag() const noexcept override { return "IntegrationError"; }
};

}  // namespace pfdde
