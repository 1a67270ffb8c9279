#pragma once

// The concrete protocols: GHZ -> Bob-Claire singlet, two singlets -> GHZ by
// teleportation, and collective concentration of phi1 copies.

#include <cstdint>
#include <vector>

#include "entacc/locc.hpp"

namespace entacc {

/// Alice measures in the x basis; on "-" Bob applies diag(1, -1). Starts
/// from ghz(3); the subsystem lists pick the qubits used when the protocol
/// is appended to another one.
Protocol ghz3_to_bc_singlet(std::vector<std::size_t> alice_subsystems = {},
                            std::vector<std::size_t> bob_subsystems = {});

/// Singlets A-B and B-C; Bob prepares a GHZ on three ancillas and teleports
/// two of its qubits to Alice and Claire. Every leaf ends as ghz(3) on
/// (A, Bob's subsystem 0, C) with Bob's remaining four subsystems in |0>.
Protocol two_singlets_to_ghz();

/// ghz(3) with four |0> ancillas attached to Bob: the target of every leaf
/// of two_singlets_to_ghz().
PureState two_singlets_to_ghz_target();

struct ConcentrationOutcome {
    /// Hamming weight of Alice's measured string.
    int weight = 0;
    double probability = 0.0;
    std::uint64_t rank = 1;
    double ghz_yield_bits = 0.0;
};

/// Alice's collective Hamming-weight measurement on n copies of phi1(alpha),
/// evaluated on the type classes: p_k = C(n,k) alpha^{2(n-k)} beta^{2k}.
std::vector<ConcentrationOutcome> concentrate_phi1(double alpha, int n_copies);

double expected_yield(const std::vector<ConcentrationOutcome>& outcomes);

struct DenseConcentration {
    std::vector<ConcentrationOutcome> outcomes;
    double expected_yield = 0.0;
    /// Largest 1 - fidelity between a post-measurement state and the uniform
    /// superposition of |s>|s>|s> over strings of the measured weight.
    double max_state_error = 0.0;
};

/// The same measurement executed on the dense 3n-qubit state (n <= 4); yields
/// are the measured entropies of Alice's post-measurement reduced state.
DenseConcentration concentrate_phi1_dense(double alpha, int n_copies);

}  // namespace entacc
