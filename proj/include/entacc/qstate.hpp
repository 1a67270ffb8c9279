#pragma once

// Dense multiparty pure and mixed states over a labelled party layout.
//
// Subsystems are flattened in layout order (party by party, each party's
// local subsystems in insertion order); the first subsystem is the most
// significant digit of the joint index.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entacc/common.hpp"

namespace entacc {

class PartyLayout {
public:
    PartyLayout() = default;
    PartyLayout(std::vector<std::string> parties, std::vector<std::vector<std::size_t>> dims,
                std::size_t max_dim = kDefaultMaxDim);

    /// One qubit per party.
    static PartyLayout qubits(const std::vector<std::string>& parties,
                              std::size_t max_dim = kDefaultMaxDim);

    const std::vector<std::string>& parties() const { return parties_; }
    const std::vector<std::vector<std::size_t>>& dims() const { return dims_; }
    std::size_t max_dim() const { return max_dim_; }

    std::size_t party_count() const { return parties_.size(); }
    std::size_t total_dim() const { return total_dim_; }
    bool has_party(const std::string& label) const;
    std::size_t party_index(const std::string& label) const;
    std::size_t local_dim(const std::string& label) const;

    /// Flattened per-subsystem dimensions in canonical order.
    std::vector<std::size_t> subsystem_dims() const;
    /// Flattened subsystem indices belonging to one party.
    std::vector<std::size_t> subsystems_of(const std::string& label) const;

    /// Layout restricted to `keep`, in canonical order.
    PartyLayout restricted(const std::vector<std::string>& keep) const;
    /// Same layout with an extra subsystem appended to `label`.
    PartyLayout with_ancilla(const std::string& label, std::size_t dim) const;
    PartyLayout with_max_dim(std::size_t max_dim) const;

    friend bool operator==(const PartyLayout& a, const PartyLayout& b) {
        return a.parties_ == b.parties_ && a.dims_ == b.dims_;
    }

private:
    std::vector<std::string> parties_;
    std::vector<std::vector<std::size_t>> dims_;
    std::size_t max_dim_ = kDefaultMaxDim;
    std::size_t total_dim_ = 1;
};

class PureState {
public:
    PureState() = default;
    PureState(PartyLayout layout, Vector amplitudes);

    const PartyLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

    Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

private:
    PartyLayout layout_;
    Vector amplitudes_;
};

class DensityMatrix {
public:
    DensityMatrix(PartyLayout layout, Matrix matrix);
    explicit DensityMatrix(const PureState& psi);

    const PartyLayout& layout() const { return layout_; }
    const Matrix& matrix() const { return matrix_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

private:
    PartyLayout layout_;
    Matrix matrix_;
};

template <class State>
struct EnsembleMember {
    double probability;
    State state;
};

/// Outcome-indexed collection {p_k, state_k} over one layout.
template <class State>
class Ensemble {
public:
    Ensemble() = default;
    explicit Ensemble(std::vector<EnsembleMember<State>> members);

    const std::vector<EnsembleMember<State>>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    const PartyLayout& layout() const { return members_.front().state.layout(); }

private:
    std::vector<EnsembleMember<State>> members_;
};

using PureEnsemble = Ensemble<PureState>;
using MixedEnsemble = Ensemble<DensityMatrix>;

class ProjectiveMeasurement {
public:
    /// Projectors act on the listed subsystems of `party` (all of them when
    /// `subsystems` is empty) and are lifted with the identity elsewhere.
    ProjectiveMeasurement(std::string party, std::vector<Matrix> projectors,
                          std::vector<std::string> labels = {},
                          std::vector<std::size_t> subsystems = {});

    const std::string& party() const { return party_; }
    const std::vector<Matrix>& projectors() const { return projectors_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::size_t>& subsystems() const { return subsystems_; }
    std::size_t outcome_count() const { return projectors_.size(); }

private:
    std::string party_;
    std::vector<Matrix> projectors_;
    std::vector<std::string> labels_;
    std::vector<std::size_t> subsystems_;
};

// Construction ---------------------------------------------------------------

PureState product_zero(const PartyLayout& layout);
PureState tensor_product(const PureState& a, const PureState& b);

/// Named states: "ghz" (params {n}), "singlet", "psi_plus", "psi_minus",
/// "phi1" / "phi2" (params {alpha}), "product_zero" (params {n}).
/// `labels` overrides the default party names A, B, C, ...
PureState make_named_state(const std::string& name, std::span<const double> params = {},
                           const std::vector<std::string>& labels = {});

PureState ghz_state(std::size_t n);
PureState phi1_state(double alpha);
PureState phi2_state(double alpha);

std::vector<std::string> default_party_labels(std::size_t n);

// Reductions and measures ----------------------------------------------------

DensityMatrix partial_trace(const PureState& state, const std::vector<std::string>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

// Local operations -----------------------------------------------------------

PureState apply_local_unitary(const PureState& state, const std::string& party, const Matrix& u,
                              const std::vector<std::size_t>& subsystems = {});
DensityMatrix apply_local_unitary(const DensityMatrix& rho, const std::string& party,
                                  const Matrix& u, const std::vector<std::size_t>& subsystems = {});

PureEnsemble measure(const PureState& state, const ProjectiveMeasurement& m);

struct MeasurementOutcome {
    std::string label;
    double probability;
    PureState state;
};

/// Like measure() but keeps the outcome label of every surviving branch.
std::vector<MeasurementOutcome> measure_outcomes(const PureState& state, const ProjectiveMeasurement& m);
MixedEnsemble measure(const DensityMatrix& rho, const ProjectiveMeasurement& m);

PureState attach_ancilla(const PureState& state, const std::string& party, std::size_t dim);

/// Per-member partial trace, probabilities unchanged.
MixedEnsemble reduce(const PureEnsemble& ensemble, const std::vector<std::string>& keep);
MixedEnsemble reduce(const MixedEnsemble& ensemble, const std::vector<std::string>& keep);
Matrix average(const MixedEnsemble& ensemble);

double fidelity(const PureState& a, const PureState& b);

bool is_unitary(const Matrix& u, double tol = kStateTol);

}  // namespace entacc
