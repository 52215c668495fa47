#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bpsk {

/// Precondition violation on caller-supplied data (bad dimension, out-of-range parameter).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configuration the closed forms do not cover (e.g. unequal priors for a click receiver).
class UnsupportedConfiguration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A matrix that must be inverted is numerically singular.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, double condition_number)
        : std::runtime_error(what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

/// A covariance matrix that was required to be pure carries a symplectic eigenvalue above 1.
class MixedStateError : public std::invalid_argument {
public:
    MixedStateError(const std::string& what, double eigenvalue)
        : std::invalid_argument(what), eigenvalue_(eigenvalue) {}

    double offending_eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Root bracketing failed: no sign change found after expansion.
class BracketError : public std::runtime_error {
public:
    BracketError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// An iterative solve did not reach its tolerance. Carries the best point found.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::pair<double, double> best_point, double best_residual)
        : std::runtime_error(what), best_point_(best_point), best_residual_(best_residual) {}

    std::pair<double, double> best_point() const noexcept { return best_point_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    std::pair<double, double> best_point_;
    double best_residual_;
};

/// The truncated number basis could not hold the state within the tail tolerance.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int dim, double tail)
        : std::runtime_error(what), dim_(dim), tail_(tail) {}

    int dim() const noexcept { return dim_; }
    double tail() const noexcept { return tail_; }

private:
    int dim_;
    double tail_;
};

} // namespace bpsk
