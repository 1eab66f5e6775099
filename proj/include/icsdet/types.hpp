#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace icsdet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: dimension mismatch, non-PD covariance, parse failure.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Request cannot be satisfied for structural reasons (e.g. a detection cap
/// below the false-alarm floor, or allocation weights that sum to zero).
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what) : Error(what) {}
};

/// An iterative routine failed to converge or hit a degenerate pencil.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// The measurement projection left no residual dimensions (q = 0), so the
/// detector cannot see anything. Callers decide how to proceed.
class BlindDetectorError : public Error {
public:
    explicit BlindDetectorError(const std::string& what) : Error(what) {}
};

}  // namespace icsdet
