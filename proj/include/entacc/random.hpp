#pragma once

// Seeded generators for property tests and fuzz protocols.

#include <cstdint>
#include <random>

#include "entacc/qstate.hpp"

namespace entacc {

using Rng = std::mt19937_64;

/// Complex Gaussian vector normalized to unit length.
Vector random_unit_vector(std::size_t dim, Rng& rng);

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
Matrix random_unitary(std::size_t dim, Rng& rng);

PureState random_pure_state(const PartyLayout& layout, Rng& rng);

/// Mixture of `rank` random pure states with random weights.
DensityMatrix random_density_matrix(const PartyLayout& layout, std::size_t rank, Rng& rng);

/// Projective measurement in a random basis with `outcomes` non-empty
/// groups of basis vectors (ranks drawn at random, summing to dim).
ProjectiveMeasurement random_projective_measurement(const std::string& party, std::size_t dim,
                                                    std::size_t outcomes, Rng& rng,
                                                    std::vector<std::size_t> subsystems = {});

}  // namespace entacc
