#pragma once

// Index arithmetic over flattened subsystem dimensions. Internal.

#include <cstddef>
#include <vector>

#include "entacc/common.hpp"

namespace entacc::detail {

/// Row-major strides: the first subsystem is the most significant digit.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims);

/// Joint-index offsets of every digit combination over `targets` (the first
/// target varies slowest), with all other digits zero.
std::vector<std::size_t> offsets_over(const std::vector<std::size_t>& dims,
                                      const std::vector<std::size_t>& targets);

/// Complement of `targets` in [0, dims.size()), ascending.
std::vector<std::size_t> complement_of(std::size_t count, const std::vector<std::size_t>& targets);

/// x <- (op on targets) x.
void apply_on_subsystems(Vector& x, const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& targets, const Matrix& op);

/// Each column of m transformed by op on targets.
void apply_on_subsystems_columns(Matrix& m, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& targets, const Matrix& op);

/// Permutation `perm` with perm[new_index] = old_index, where the new order
/// lists subsystems as `order` (a permutation of [0, dims.size())).
std::vector<std::size_t> index_permutation(const std::vector<std::size_t>& dims,
                                           const std::vector<std::size_t>& order);

std::size_t product_of(const std::vector<std::size_t>& dims);

}  // namespace entacc::detail
