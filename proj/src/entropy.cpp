#include "entacc/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace entacc {

RealVector hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double shannon_entropy(const RealVector& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > kEigenCutoff) s -= p[i] * std::log2(p[i]);
    return s;
}

double von_neumann_entropy(const Matrix& rho) {
    const auto d = static_cast<double>(rho.rows());
    return std::clamp(shannon_entropy(hermitian_eigenvalues(rho)), 0.0, std::log2(d));
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

double relative_entropy(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(sigma));
    const auto& lambda = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    const Matrix rotated = v.adjoint() * hermitian_part(rho) * v;
    // -Tr rho log2 sigma, evaluated in sigma's eigenbasis.
    double cross = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double weight = rotated(i, i).real();
        if (lambda[i] <= kEigenCutoff) {
            if (weight > kEigenCutoff) return kInfinity;
            continue;
        }
        cross -= weight * std::log2(lambda[i]);
    }
    return cross - von_neumann_entropy(rho);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (!(rho.layout() == sigma.layout())) throw std::invalid_argument("relative_entropy: layouts differ");
    return relative_entropy(rho.matrix(), sigma.matrix());
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace entacc
