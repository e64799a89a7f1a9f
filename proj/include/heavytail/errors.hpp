#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace heavytail {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Quadrature or series failed to reach the requested tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& msg, double achieved)
        : Error(msg), achieved_error(achieved) {}
    double achieved_error;
};

// Iterative solver ran out of iterations.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

class StabilityMismatchError : public Error {
public:
    using Error::Error;
};

class DegenerateTailError : public Error {
public:
    using Error::Error;
};

class TailUndefinedError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Evaluation requested on an ambiguous branch cut.
class BranchError : public Error {
public:
    using Error::Error;
};

// Complex root continuation lost its branch.
class RootTrackingError : public Error {
public:
    RootTrackingError(const std::string& msg, std::complex<double> last)
        : Error(msg), last_iterate(last) {}
    std::complex<double> last_iterate;
};

// Functional inversion (e.g. of a Green function) failed.
class InversionError : public Error {
public:
    InversionError(const std::string& msg, double res)
        : Error(msg), residual(res) {}
    double residual;
};

class ExtrapolationError : public Error {
public:
    using Error::Error;
};

class EigensolverError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace heavytail
