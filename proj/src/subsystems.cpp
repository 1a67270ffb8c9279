#include "subsystems.hpp"

#include <algorithm>

namespace entacc::detail {

std::size_t product_of(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (auto d : dims) p *= d;
    return p;
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * dims[i];
    return strides;
}

std::vector<std::size_t> offsets_over(const std::vector<std::size_t>& dims,
                                      const std::vector<std::size_t>& targets) {
    const auto strides = strides_of(dims);
    std::vector<std::size_t> offsets{0};
    for (auto t : targets) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * dims[t]);
        for (auto base : offsets)
            for (std::size_t digit = 0; digit < dims[t]; ++digit) next.push_back(base + digit * strides[t]);
        offsets = std::move(next);
    }
    return offsets;
}

std::vector<std::size_t> complement_of(std::size_t count, const std::vector<std::size_t>& targets) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < count; ++i)
        if (std::find(targets.begin(), targets.end(), i) == targets.end()) rest.push_back(i);
    return rest;
}

void apply_on_subsystems(Vector& x, const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& targets, const Matrix& op) {
    const auto inner = offsets_over(dims, targets);
    const auto outer = offsets_over(dims, complement_of(dims.size(), targets));
    const auto n = static_cast<Eigen::Index>(inner.size());
    Vector sub(n);
    for (auto base : outer) {
        for (Eigen::Index i = 0; i < n; ++i) sub[i] = x[static_cast<Eigen::Index>(base + inner[i])];
        Vector out = op * sub;
        for (Eigen::Index i = 0; i < n; ++i) x[static_cast<Eigen::Index>(base + inner[i])] = out[i];
    }
}

void apply_on_subsystems_columns(Matrix& m, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& targets, const Matrix& op) {
    const auto inner = offsets_over(dims, targets);
    const auto outer = offsets_over(dims, complement_of(dims.size(), targets));
    const auto n = static_cast<Eigen::Index>(inner.size());
    Matrix block(n, m.cols());
    for (auto base : outer) {
        for (Eigen::Index i = 0; i < n; ++i) block.row(i) = m.row(static_cast<Eigen::Index>(base + inner[i]));
        Matrix out = op * block;
        for (Eigen::Index i = 0; i < n; ++i) m.row(static_cast<Eigen::Index>(base + inner[i])) = out.row(i);
    }
}

std::vector<std::size_t> index_permutation(const std::vector<std::size_t>& dims,
                                           const std::vector<std::size_t>& order) {
    // offsets_over enumerates exactly "new index -> old index" for a full order.
    return offsets_over(dims, order);
}

}  // namespace entacc::detail
