#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace entacc {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Tolerances shared across the library.
inline constexpr double kStateTol = 1e-10;
inline constexpr double kEigenCutoff = 1e-12;
inline constexpr double kBranchCutoff = 1e-12;
inline constexpr std::size_t kDefaultMaxDim = 4096;

/// Raised when an operation would exceed the joint-dimension cap.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Raised when a relative entropy needed by an exact identity is infinite.
class SupportError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Hermitian part (M + M^dagger) / 2.
inline Matrix hermitian_part(const Matrix& m) {
    return (m + m.adjoint()) * 0.5;
}

}  // namespace entacc
