#pragma once

// Branching execution of LOCC protocols with per-step entropy ledgers and
// the relative-entropy audits built on top of them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entacc/separable.hpp"

namespace entacc {

/// Named local gate: "I", "H", "X", "Y", "Z", "S", "Ry" {theta}, "phase"
/// {phi} (diag(1, e^{i phi})), "diag" {phi_0, phi_1, ...}, "CNOT", "SWAP",
/// or "custom" with an explicit matrix.
struct GateSpec {
    std::string name = "I";
    std::vector<double> params;
    Matrix matrix;

    static GateSpec custom(Matrix m) { return {"custom", {}, std::move(m)}; }
};

/// Matrix of a gate acting on a local space of dimension `dim`.
Matrix resolve_gate(const GateSpec& gate, std::size_t dim);

/// Named measurement basis: "computational", "x_basis", "bell_basis" (two
/// qubit subsystems), or "custom" with explicit projectors and labels.
struct BasisSpec {
    std::string name = "computational";
    std::vector<Matrix> projectors;
    std::vector<std::string> labels;
};

/// Projective measurement of `basis` on the listed local subsystems of
/// `party` whose dimensions are `subsystem_dims`.
ProjectiveMeasurement resolve_basis(const BasisSpec& basis, const std::string& party,
                                    const std::vector<std::size_t>& subsystem_dims,
                                    const std::vector<std::size_t>& subsystems);

/// One entry of the classical record.
struct Outcome {
    std::size_t step = 0;
    std::string label;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct ProtocolStep {
    enum class Kind { local_unitary, measure, attach_ancilla };

    Kind kind = Kind::local_unitary;
    std::string party;
    /// Local subsystem indices of the party; empty means all of them.
    std::vector<std::size_t> subsystems;
    GateSpec gate;
    BasisSpec basis;
    std::size_t ancilla_dim = 2;
    /// Every listed outcome must appear in the branch record.
    std::vector<Outcome> condition;
    /// Evaluate E_r brackets after this step.
    bool audit = false;

    static ProtocolStep unitary(std::string party, GateSpec gate, std::vector<std::size_t> subsystems = {},
                                std::vector<Outcome> condition = {});
    static ProtocolStep measurement(std::string party, BasisSpec basis, std::vector<std::size_t> subsystems = {},
                                    std::vector<Outcome> condition = {});
    static ProtocolStep ancilla(std::string party, std::size_t dim = 2);

    std::string describe() const;
};

struct Protocol {
    std::string name;
    PureState initial;
    std::vector<ProtocolStep> steps;

    /// Layout before each step and after the last one (size steps + 1).
    /// Throws on unknown parties, bad subsystems, malformed conditions,
    /// conditioned ancillas or a dimension cap overrun.
    std::vector<PartyLayout> layouts() const;
    void validate() const { (void)layouts(); }
};

/// `first` followed by `second`; the second protocol's condition step
/// indices are shifted and its initial state is ignored.
Protocol concat(const Protocol& first, const Protocol& second, std::string name = {});

struct BranchState {
    std::vector<Outcome> record;
    double probability = 1.0;
    PureState state;
};

struct ReeBracket {
    double lower = 0.0;
    double upper = 0.0;
    bool converged = true;

    double width() const { return upper - lower; }
};

struct BranchDetail {
    std::vector<Outcome> record;
    double probability = 1.0;
    /// Indexed like LedgerReport::groups.
    std::vector<double> entropy;
    /// Indexed like LedgerReport::targets; empty on rows without E_r.
    std::vector<ReeBracket> ree;
};

struct LedgerRow {
    /// 0 is the initial state; row k follows step k - 1.
    std::size_t row = 0;
    std::string description;
    std::optional<ProtocolStep::Kind> kind;
    std::string party;
    std::vector<double> entropy;
    std::vector<ReeBracket> ree;
    bool has_ree = false;
    double total_probability = 1.0;
    /// Half the sum of single-party entropies: the number of e-bits when the
    /// state is a collection of two-party singlets.
    double ledger_ebits = 0.0;
    std::vector<BranchDetail> branches;
};

struct LedgerReport {
    std::string protocol;
    std::vector<std::string> parties;
    /// Party groups whose entropies are tracked; single parties come first.
    std::vector<std::vector<std::string>> groups;
    /// Partitions (over subsets of the parties) whose E_r / E_Sigma is tracked.
    std::vector<Partition> targets;
    std::vector<LedgerRow> rows;

    std::size_t group_index(const std::vector<std::string>& group) const;
    std::size_t target_index(const Partition& target) const;
};

struct RunOptions {
    /// Audit splits X|Y|...: the first block is the entropy side, the rest
    /// form the partition whose E_r is tracked.
    std::vector<Partition> splits;
    std::vector<Partition> targets;
    OptimizerConfig ree_config;
    bool ree_at_ends = true;
    std::size_t max_branches = 4096;
};

/// Partition tracked for a split: the blocks after the first, or the
/// parties of a single remaining block each on their own.
Partition spectator_partition(const Partition& split);

struct RunResult {
    std::vector<BranchState> leaves;
    LedgerReport ledger;
};

RunResult run(const Protocol& protocol, const RunOptions& options = {});

// Audits ---------------------------------------------------------------------

enum class Verdict { pass, violation, indeterminate };
std::string to_string(Verdict v);

/// Bracket width up to which a non-violated inequality counts as decided.
inline constexpr double kDecideTol = 1e-3;

struct InequalityCheck {
    /// sum_k p_k E_upper(after_k) - E_upper(before).
    double lhs = 0.0;
    /// Probability-weighted bracket uncertainty of lhs.
    double width = 0.0;
    double rhs = 0.0;
    /// Sum of all bracket gaps + 1e-6.
    double slack = 0.0;
    Verdict verdict = Verdict::pass;
    /// |lhs - rhs| <= width + kDecideTol.
    bool saturated = false;
};

/// Conservative decision rule shared by every E_r audit.
InequalityCheck check_inequality(const ReeBracket& before, const std::vector<double>& probabilities,
                                 const std::vector<ReeBracket>& after, double rhs);

struct AuditRow {
    std::size_t from_row = 0;
    std::size_t to_row = 0;
    std::vector<Outcome> record;
    double probability = 1.0;
    /// S(X) before minus average S(X) after; never negative up to 1e-9.
    double entropy_drop = 0.0;
    bool entropy_ok = true;
    /// Average E(rest) change bounded by the entropy drop.
    InequalityCheck per_step;
    /// E(rest) non-increasing, checked only when no party of the entropy
    /// side measured in the segment.
    std::optional<InequalityCheck> monotone;
};

/// Audit of one segment from a single branch: `post` lists the branch's
/// descendants with conditional probabilities.
AuditRow audit_step(const BranchState& pre, const PureEnsemble& post, const Partition& split,
                    const OptimizerConfig& config = {});

struct ReversibilityVerdict {
    bool entropy_conserved = false;
    double entropy_change = 0.0;
    double ree_drift = 0.0;
    double drift_width = 0.0;
    /// "conserved", "irreversible" or "indeterminate".
    std::string verdict;
};

struct ProtocolAudit {
    std::string split;
    std::vector<AuditRow> rows;
    ReeBracket initial_ree;
    ReeBracket final_ree;
    double initial_entropy = 0.0;
    double final_entropy = 0.0;
    InequalityCheck overall;
    ReversibilityVerdict reversibility;
    int violations = 0;
    int indeterminate = 0;
    int ree_checks = 0;

    bool passed() const { return violations == 0; }
};

/// Segment audits between consecutive rows carrying E_r, plus the whole-run
/// inequality and the reversibility verdict for `split`.
ProtocolAudit audit_protocol(const LedgerReport& report, const Partition& split);

/// Seeded random protocol on a random pure initial state: each round is a
/// local unitary, a random projective measurement, and outcome-conditioned
/// local unitaries; E_r is audited after every round.
Protocol random_protocol(const PartyLayout& layout, int rounds, std::uint64_t seed);

}  // namespace entacc
