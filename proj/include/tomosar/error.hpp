#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tomosar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Vector/matrix sizes disagree, or a requested allocation exceeds the budget.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration limit before certifying convergence.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int iterations, double residual)
        : Error(what + " (iterations=" + std::to_string(iterations) +
                ", residual=" + std::to_string(residual) + ")"),
          iterations_(iterations),
          residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// The design matrix of a least-squares style problem lost rank.
class RankDeficient : public Error {
public:
    using Error::Error;
};

} // namespace tomosar
