#include "entacc/random.hpp"

#include <algorithm>
#include <numeric>

namespace entacc {

namespace {

Matrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

}  // namespace

Vector random_unit_vector(std::size_t dim, Rng& rng) {
    Vector v = ginibre(dim, 1, rng).col(0);
    return v / v.norm();
}

Matrix random_unitary(std::size_t dim, Rng& rng) {
    const Matrix z = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix column phases so the distribution is Haar.
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const cplx d = r(j, j);
        const double a = std::abs(d);
        if (a > 0.0) q.col(j) *= d / a;
    }
    return q;
}

PureState random_pure_state(const PartyLayout& layout, Rng& rng) {
    return PureState(layout, random_unit_vector(layout.total_dim(), rng));
}

DensityMatrix random_density_matrix(const PartyLayout& layout, std::size_t rank, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.05, 1.0);
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    Matrix acc = Matrix::Zero(d, d);
    std::vector<double> w(std::max<std::size_t>(rank, 1));
    for (auto& x : w) x = uniform(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto x : w) {
        const Vector v = random_unit_vector(layout.total_dim(), rng);
        acc += (x / total) * v * v.adjoint();
    }
    return DensityMatrix(layout, hermitian_part(acc));
}

ProjectiveMeasurement random_projective_measurement(const std::string& party, std::size_t dim,
                                                    std::size_t outcomes, Rng& rng,
                                                    std::vector<std::size_t> subsystems) {
    outcomes = std::clamp<std::size_t>(outcomes, 1, dim);
    const Matrix basis = random_unitary(dim, rng);
    // Ranks: one vector per outcome, the rest scattered at random.
    std::vector<std::size_t> owner(dim);
    for (std::size_t i = 0; i < outcomes; ++i) owner[i] = i;
    std::uniform_int_distribution<std::size_t> pick(0, outcomes - 1);
    for (std::size_t i = outcomes; i < dim; ++i) owner[i] = pick(rng);
    std::vector<Matrix> projectors(outcomes, Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto col = basis.col(static_cast<Eigen::Index>(i));
        projectors[owner[i]] += col * col.adjoint();
    }
    for (auto& p : projectors) p = hermitian_part(p);
    return ProjectiveMeasurement(party, std::move(projectors), {}, std::move(subsystems));
}

}  // namespace entacc
