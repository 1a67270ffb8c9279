#pragma once

// Relative entropy of entanglement (and its generalisation to sets of
// partition-product mixtures) by conditional gradient over explicit
// separable mixtures.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entacc/entropy.hpp"
#include "entacc/qstate.hpp"

namespace entacc {

/// Disjoint, non-empty blocks of party labels; at least two blocks.
class Partition {
public:
    explicit Partition(std::vector<std::vector<std::string>> blocks);

    /// "A|B,C" -> {{A}, {B, C}}.
    static Partition parse(const std::string& text);
    /// Every party in its own block.
    static Partition finest(const std::vector<std::string>& parties);

    const std::vector<std::vector<std::string>>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    std::vector<std::string> parties() const;
    std::string to_string() const;

    /// Throws unless the blocks cover exactly the layout's parties.
    void check_covers(const PartyLayout& layout) const;

    friend bool operator==(const Partition& a, const Partition& b) { return a.blocks_ == b.blocks_; }

private:
    std::vector<std::vector<std::string>> blocks_;
};

/// One normalized local pure state per block of a partition.
struct ProductAtom {
    std::size_t partition_index = 0;
    std::vector<Vector> factors;
};

/// Joint vector of a product atom in the layout's canonical order.
Vector product_vector(const PartyLayout& layout, const Partition& partition, const ProductAtom& atom);

class SeparableModel {
public:
    SeparableModel() = default;
    SeparableModel(PartyLayout layout, std::vector<Partition> partitions, std::vector<ProductAtom> atoms,
                   std::vector<double> weights);

    const PartyLayout& layout() const { return layout_; }
    const std::vector<Partition>& partitions() const { return partitions_; }
    const std::vector<ProductAtom>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }

    DensityMatrix assemble() const;

private:
    PartyLayout layout_;
    std::vector<Partition> partitions_;
    std::vector<ProductAtom> atoms_;
    std::vector<double> weights_;
};

struct OptimizerConfig {
    double gap_tol = 1e-6;
    int max_iters = 2000;
    int restarts = 16;
    std::uint64_t seed = 0;
    double epsilon = 1e-9;
    /// Extra partitions whose product mixtures join the feasible set.
    std::vector<Partition> partitions;
    std::size_t max_atoms = 512;

    void validate() const;
};

struct REEResult {
    double upper = 0.0;
    double lower = 0.0;
    SeparableModel model;
    int iterations = 0;
    int restarts_used = 0;
    bool converged = false;
    /// Objective after every accepted iteration (non-increasing).
    std::vector<double> upper_trace;

    double gap() const { return upper - lower; }
};

/// min S(rho||sigma) over mixtures of product states across `partition`
/// (together with any partitions listed in the config).
REEResult ree(const DensityMatrix& rho, const Partition& partition, const OptimizerConfig& config = {});
REEResult ree(const DensityMatrix& rho, const std::vector<Partition>& partitions,
              const OptimizerConfig& config = {});

struct LmoResult {
    ProductAtom atom;
    double value = 0.0;
    int starts = 0;
};

/// Approximate argmin of <a|G|a> over product states by block-coordinate
/// eigenvector sweeps from `restarts` random starts plus deterministic ones.
LmoResult lmo_product_atom(const Matrix& gradient, const PartyLayout& layout, const Partition& partition,
                           int restarts, std::uint64_t seed, const std::vector<ProductAtom>& warm_starts = {});

/// | -S(rho||sigma) - sum_k p_k (S(rho_k||rho) - S(rho_k||sigma)) | with
/// rho the ensemble average. Throws SupportError if any term is infinite.
double donald_identity_residual(const MixedEnsemble& ensemble, const DensityMatrix& sigma);

// Monotonicity probe ---------------------------------------------------------

struct LocalOp {
    enum class Kind { unitary, measurement, random_unitary, random_measurement };
    Kind kind = Kind::unitary;
    std::string party;
    std::vector<std::size_t> subsystems;
    Matrix unitary;
    std::optional<ProjectiveMeasurement> measurement;
    /// Outcome count for random measurements.
    std::size_t outcomes = 2;
};

/// A sequence of local operations; random entries are redrawn per trial and,
/// after a measurement, independently per outcome branch.
struct LocalChannel {
    std::vector<LocalOp> ops;

    static LocalChannel identity() { return {}; }
};

MixedEnsemble apply_channel(const DensityMatrix& rho, const LocalChannel& channel, std::uint64_t seed);

struct MonotonicityTrial {
    double initial_upper = 0.0;
    double initial_lower = 0.0;
    std::vector<double> probabilities;
    std::vector<double> final_upper;
    std::vector<double> final_lower;
    double average_final_upper = 0.0;
    double slack = 0.0;
    double slack_consumed = 0.0;
    bool violation = false;
};

struct MonotonicityReport {
    std::vector<MonotonicityTrial> trials;
    int violations = 0;
    bool passed() const { return violations == 0; }
};

/// Checks E(rho) >= sum_k p_k E(rho_k) after the channel, flagging a
/// violation only when the optimizer brackets certify it.
MonotonicityReport er_monotonicity_probe(const DensityMatrix& rho, const Partition& partition,
                                         const LocalChannel& channel, int trials, std::uint64_t seed,
                                         const OptimizerConfig& config = {});

}  // namespace entacc
