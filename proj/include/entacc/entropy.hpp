#pragma once

#include <limits>

#include "entacc/qstate.hpp"

namespace entacc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Eigenvalues of the Hermitian part, ascending.
RealVector hermitian_eigenvalues(const Matrix& m);

/// Shannon entropy in bits of a probability vector; entries below the
/// eigenvalue cutoff count as zero.
double shannon_entropy(const RealVector& p);

/// S(rho) = -Tr rho log2 rho.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const Matrix& rho);

/// S(rho||sigma) in bits. Returns kInfinity when the support of rho is not
/// contained in the support of sigma.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
double relative_entropy(const Matrix& rho, const Matrix& sigma);

/// H(x) = -x log2 x - (1-x) log2 (1-x).
double binary_entropy(double x);

}  // namespace entacc
