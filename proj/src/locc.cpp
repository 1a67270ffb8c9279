#include "entacc/locc.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "entacc/random.hpp"

namespace entacc {

namespace {

const double kSqrtHalf = std::sqrt(0.5);

std::vector<std::size_t> local_subsystem_dims(const PartyLayout& layout, const std::string& party,
                                              const std::vector<std::size_t>& subsystems) {
    const auto& all = layout.dims().at(layout.party_index(party));
    if (subsystems.empty()) return all;
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    for (auto i : subsystems) {
        if (i >= all.size())
            throw std::invalid_argument("subsystem " + std::to_string(i) + " out of range for party " + party);
        if (!seen.insert(i).second) throw std::invalid_argument("repeated subsystem index for party " + party);
        out.push_back(all[i]);
    }
    return out;
}

std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (auto d : dims) p *= d;
    return p;
}

Matrix qubit_gate(const std::string& name, const std::vector<double>& params) {
    const cplx i(0.0, 1.0);
    Matrix m(2, 2);
    if (name == "H") {
        m << kSqrtHalf, kSqrtHalf, kSqrtHalf, -kSqrtHalf;
    } else if (name == "X") {
        m << 0, 1, 1, 0;
    } else if (name == "Y") {
        m << 0, -i, i, 0;
    } else if (name == "Z") {
        m << 1, 0, 0, -1;
    } else if (name == "S") {
        m << 1, 0, 0, i;
    } else if (name == "Ry") {
        if (params.size() != 1) throw std::invalid_argument("Ry takes one angle");
        const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
        m << c, -s, s, c;
    } else if (name == "phase") {
        if (params.size() != 1) throw std::invalid_argument("phase takes one angle");
        m << 1, 0, 0, std::exp(i * params[0]);
    } else {
        throw std::invalid_argument("unknown gate: " + name);
    }
    return m;
}

bool satisfied(const std::vector<Outcome>& condition, const std::vector<Outcome>& record) {
    for (const auto& c : condition)
        if (std::find(record.begin(), record.end(), c) == record.end()) return false;
    return true;
}

bool has_prefix(const std::vector<Outcome>& record, const std::vector<Outcome>& prefix) {
    return record.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), record.begin());
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

// Memo of E_r brackets keyed by the reduced matrix, so that branches whose
// spectator state did not change are not re-optimized.
class ReeCache {
public:
    ReeBracket get(const DensityMatrix& rho, const Partition& target, const OptimizerConfig& config) {
        for (const auto& [m, b] : entries_)
            if (m.rows() == rho.matrix().rows() && (m - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-13) return b;
        const auto r = ree(rho, target, config);
        ReeBracket b{r.lower, r.upper, r.converged};
        entries_.emplace_back(rho.matrix(), b);
        return b;
    }

private:
    std::vector<std::pair<Matrix, ReeBracket>> entries_;
};

}  // namespace

// Payloads -------------------------------------------------------------------

Matrix resolve_gate(const GateSpec& gate, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix m;
    if (gate.name == "I") {
        m = Matrix::Identity(d, d);
    } else if (gate.name == "custom") {
        m = gate.matrix;
    } else if (gate.name == "diag") {
        if (gate.params.size() != dim) throw std::invalid_argument("diag gate needs one phase per level");
        m = Matrix::Zero(d, d);
        for (Eigen::Index k = 0; k < d; ++k) m(k, k) = std::exp(cplx(0.0, gate.params[static_cast<std::size_t>(k)]));
    } else if (gate.name == "CNOT" || gate.name == "SWAP") {
        m = Matrix::Zero(4, 4);
        if (gate.name == "CNOT") {
            m(0, 0) = m(1, 1) = 1.0;
            m(2, 3) = m(3, 2) = 1.0;
        } else {
            m(0, 0) = m(3, 3) = 1.0;
            m(1, 2) = m(2, 1) = 1.0;
        }
    } else {
        m = qubit_gate(gate.name, gate.params);
    }
    if (static_cast<std::size_t>(m.rows()) != dim || m.rows() != m.cols())
        throw std::invalid_argument("gate " + gate.name + " does not act on a space of dimension " + std::to_string(dim));
    if (!is_unitary(m)) throw std::invalid_argument("gate " + gate.name + " is not unitary");
    return m;
}

ProjectiveMeasurement resolve_basis(const BasisSpec& basis, const std::string& party,
                                    const std::vector<std::size_t>& subsystem_dims,
                                    const std::vector<std::size_t>& subsystems) {
    const auto d = static_cast<Eigen::Index>(product(subsystem_dims));
    std::vector<Matrix> projectors;
    std::vector<std::string> labels;
    auto add_ray = [&](const Vector& v, std::string label) {
        projectors.push_back(v * v.adjoint());
        labels.push_back(std::move(label));
    };
    if (basis.name == "custom") {
        return ProjectiveMeasurement(party, basis.projectors, basis.labels, subsystems);
    } else if (basis.name == "computational") {
        const bool short_digits = std::all_of(subsystem_dims.begin(), subsystem_dims.end(), [](auto x) { return x <= 10; });
        for (Eigen::Index k = 0; k < d; ++k) {
            std::vector<std::string> digits(subsystem_dims.size());
            auto rest = static_cast<std::size_t>(k);
            for (std::size_t s = subsystem_dims.size(); s-- > 0;) {
                digits[s] = std::to_string(rest % subsystem_dims[s]);
                rest /= subsystem_dims[s];
            }
            add_ray(Vector::Unit(d, k), join(digits, short_digits ? "" : ","));
        }
    } else if (basis.name == "x_basis") {
        for (auto sd : subsystem_dims)
            if (sd != 2) throw std::invalid_argument("x_basis needs qubit subsystems");
        for (Eigen::Index k = 0; k < d; ++k) {
            Vector v = Vector::Ones(1);
            std::string label;
            for (std::size_t s = 0; s < subsystem_dims.size(); ++s) {
                const bool minus = (k >> (subsystem_dims.size() - 1 - s)) & 1;
                Vector f(2);
                f << kSqrtHalf, minus ? -kSqrtHalf : kSqrtHalf;
                Vector next(v.size() * 2);
                for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(2 * a, 2) = v[a] * f;
                v = std::move(next);
                label += minus ? '-' : '+';
            }
            add_ray(v, label);
        }
    } else if (basis.name == "bell_basis") {
        if (subsystem_dims != std::vector<std::size_t>{2, 2})
            throw std::invalid_argument("bell_basis needs exactly two qubit subsystems");
        const double r = kSqrtHalf;
        Vector v(4);
        v << r, 0, 0, r;
        add_ray(v, "phi+");
        v << r, 0, 0, -r;
        add_ray(v, "phi-");
        v << 0, r, r, 0;
        add_ray(v, "psi+");
        v << 0, r, -r, 0;
        add_ray(v, "psi-");
    } else {
        throw std::invalid_argument("unknown measurement basis: " + basis.name);
    }
    return ProjectiveMeasurement(party, std::move(projectors), std::move(labels), subsystems);
}

// Steps and protocols --------------------------------------------------------

ProtocolStep ProtocolStep::unitary(std::string party, GateSpec gate, std::vector<std::size_t> subsystems,
                                   std::vector<Outcome> condition) {
    ProtocolStep s;
    s.kind = Kind::local_unitary;
    s.party = std::move(party);
    s.gate = std::move(gate);
    s.subsystems = std::move(subsystems);
    s.condition = std::move(condition);
    return s;
}

ProtocolStep ProtocolStep::measurement(std::string party, BasisSpec basis, std::vector<std::size_t> subsystems,
                                       std::vector<Outcome> condition) {
    ProtocolStep s;
    s.kind = Kind::measure;
    s.party = std::move(party);
    s.basis = std::move(basis);
    s.subsystems = std::move(subsystems);
    s.condition = std::move(condition);
    return s;
}

ProtocolStep ProtocolStep::ancilla(std::string party, std::size_t dim) {
    ProtocolStep s;
    s.kind = Kind::attach_ancilla;
    s.party = std::move(party);
    s.ancilla_dim = dim;
    return s;
}

std::string ProtocolStep::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::local_unitary: out << "unitary " << party << ' ' << gate.name; break;
        case Kind::measure: out << "measure " << party << ' ' << basis.name; break;
        case Kind::attach_ancilla: out << "ancilla " << party << ' ' << ancilla_dim; break;
    }
    if (!subsystems.empty()) {
        out << " [";
        for (std::size_t i = 0; i < subsystems.size(); ++i) out << (i ? "," : "") << subsystems[i];
        out << ']';
    }
    if (!condition.empty()) {
        out << " if";
        for (const auto& c : condition) out << ' ' << c.step << ':' << c.label;
    }
    return out.str();
}

std::vector<PartyLayout> Protocol::layouts() const {
    std::vector<PartyLayout> out{initial.layout()};
    std::vector<std::vector<std::string>> labels(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        const auto& layout = out.back();
        const auto where = "step " + std::to_string(i) + ": ";
        if (!layout.has_party(step.party)) throw std::invalid_argument(where + "unknown party " + step.party);
        for (const auto& c : step.condition) {
            if (c.step >= i || steps[c.step].kind != ProtocolStep::Kind::measure)
                throw std::invalid_argument(where + "condition must reference an earlier measurement");
            const auto& known = labels[c.step];
            if (std::find(known.begin(), known.end(), c.label) == known.end())
                throw std::invalid_argument(where + "condition references unknown outcome " + c.label);
        }
        switch (step.kind) {
            case ProtocolStep::Kind::local_unitary:
                resolve_gate(step.gate, product(local_subsystem_dims(layout, step.party, step.subsystems)));
                out.push_back(layout);
                break;
            case ProtocolStep::Kind::measure:
                labels[i] = resolve_basis(step.basis, step.party,
                                          local_subsystem_dims(layout, step.party, step.subsystems), step.subsystems)
                                .labels();
                out.push_back(layout);
                break;
            case ProtocolStep::Kind::attach_ancilla:
                if (!step.condition.empty())
                    throw std::invalid_argument(where + "ancillas cannot be attached conditionally");
                out.push_back(layout.with_ancilla(step.party, step.ancilla_dim));
                break;
        }
    }
    return out;
}

Protocol concat(const Protocol& first, const Protocol& second, std::string name) {
    Protocol out = first;
    out.name = name.empty() ? first.name + "+" + second.name : std::move(name);
    const auto shift = first.steps.size();
    for (auto step : second.steps) {
        for (auto& c : step.condition) c.step += shift;
        out.steps.push_back(std::move(step));
    }
    return out;
}

Partition spectator_partition(const Partition& split) {
    const auto& blocks = split.blocks();
    if (blocks.size() >= 3) return Partition({blocks.begin() + 1, blocks.end()});
    if (blocks[1].size() < 2)
        throw std::invalid_argument("split " + split.to_string() + " leaves a single spectator party");
    return Partition::finest(blocks[1]);
}

std::size_t LedgerReport::group_index(const std::vector<std::string>& group) const {
    auto sorted = group;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto g = groups[i];
        std::sort(g.begin(), g.end());
        if (g == sorted) return i;
    }
    throw std::invalid_argument("ledger has no entropy entries for group " + join(group, ","));
}

std::size_t LedgerReport::target_index(const Partition& target) const {
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (targets[i] == target) return i;
    throw std::invalid_argument("ledger has no E_r entries for " + target.to_string());
}

// Execution ------------------------------------------------------------------

RunResult run(const Protocol& protocol, const RunOptions& options) {
    const auto layouts = protocol.layouts();
    const auto& steps = protocol.steps;

    std::vector<Matrix> gates(steps.size());
    std::vector<std::optional<ProjectiveMeasurement>> measurements(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        const auto dims = local_subsystem_dims(layouts[i], s.party, s.subsystems);
        if (s.kind == ProtocolStep::Kind::local_unitary) gates[i] = resolve_gate(s.gate, product(dims));
        if (s.kind == ProtocolStep::Kind::measure)
            measurements[i] = resolve_basis(s.basis, s.party, dims, s.subsystems);
    }

    RunResult result;
    auto& ledger = result.ledger;
    ledger.protocol = protocol.name;
    ledger.parties = protocol.initial.layout().parties();
    for (const auto& p : ledger.parties) ledger.groups.push_back({p});
    auto add_target = [&](const Partition& t) {
        for (const auto& p : t.parties())
            if (!protocol.initial.layout().has_party(p)) throw std::invalid_argument("unknown party in target: " + p);
        if (std::find(ledger.targets.begin(), ledger.targets.end(), t) == ledger.targets.end())
            ledger.targets.push_back(t);
    };
    for (const auto& split : options.splits) {
        split.check_covers(protocol.initial.layout());
        const auto& head = split.blocks().front();
        try {
            ledger.group_index(head);
        } catch (const std::invalid_argument&) {
            ledger.groups.push_back(head);
        }
        add_target(spectator_partition(split));
    }
    for (const auto& t : options.targets) add_target(t);

    std::vector<ReeCache> caches(ledger.targets.size());
    auto make_row = [&](std::size_t row, const std::vector<BranchState>& live, bool with_ree) {
        LedgerRow r;
        r.row = row;
        if (row == 0) {
            r.description = "initial";
        } else {
            const auto& s = steps[row - 1];
            r.description = s.describe();
            r.kind = s.kind;
            r.party = s.party;
        }
        r.has_ree = with_ree && !ledger.targets.empty();
        r.entropy.assign(ledger.groups.size(), 0.0);
        if (r.has_ree) r.ree.assign(ledger.targets.size(), ReeBracket{});
        r.total_probability = 0.0;
        for (const auto& b : live) {
            BranchDetail detail;
            detail.record = b.record;
            detail.probability = b.probability;
            r.total_probability += b.probability;
            for (std::size_t g = 0; g < ledger.groups.size(); ++g) {
                const double s = von_neumann_entropy(partial_trace(b.state, ledger.groups[g]));
                detail.entropy.push_back(s);
                r.entropy[g] += b.probability * s;
            }
            if (r.has_ree) {
                for (std::size_t t = 0; t < ledger.targets.size(); ++t) {
                    const auto& target = ledger.targets[t];
                    const auto bracket =
                        caches[t].get(partial_trace(b.state, target.parties()), target, options.ree_config);
                    detail.ree.push_back(bracket);
                    r.ree[t].lower += b.probability * bracket.lower;
                    r.ree[t].upper += b.probability * bracket.upper;
                    r.ree[t].converged = r.ree[t].converged && bracket.converged;
                }
            }
            r.branches.push_back(std::move(detail));
        }
        for (std::size_t g = 0; g < ledger.parties.size(); ++g) r.ledger_ebits += 0.5 * r.entropy[g];
        if (std::abs(r.total_probability - 1.0) > 1e-9)
            throw std::logic_error("branch probabilities no longer sum to one");
        ledger.rows.push_back(std::move(r));
    };

    std::vector<BranchState> live{{{}, 1.0, protocol.initial}};
    make_row(0, live, options.ree_at_ends);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        std::vector<BranchState> next;
        for (auto& b : live) {
            if (!satisfied(s.condition, b.record)) {
                next.push_back(std::move(b));
                continue;
            }
            switch (s.kind) {
                case ProtocolStep::Kind::local_unitary:
                    b.state = apply_local_unitary(b.state, s.party, gates[i], s.subsystems);
                    next.push_back(std::move(b));
                    break;
                case ProtocolStep::Kind::attach_ancilla:
                    b.state = attach_ancilla(b.state, s.party, s.ancilla_dim);
                    next.push_back(std::move(b));
                    break;
                case ProtocolStep::Kind::measure:
                    for (auto& o : measure_outcomes(b.state, *measurements[i])) {
                        BranchState child{b.record, b.probability * o.probability, std::move(o.state)};
                        child.record.push_back({i, o.label});
                        next.push_back(std::move(child));
                    }
                    break;
            }
            if (next.size() > options.max_branches)
                throw CapacityError("protocol exceeds " + std::to_string(options.max_branches) + " live branches");
        }
        live = std::move(next);
        const bool last = i + 1 == steps.size();
        make_row(i + 1, live, s.audit || (last && options.ree_at_ends));
    }
    result.leaves = std::move(live);
    return result;
}

// Audits ---------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::violation: return "violation";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "?";
}

InequalityCheck check_inequality(const ReeBracket& before, const std::vector<double>& probabilities,
                                 const std::vector<ReeBracket>& after, double rhs) {
    if (probabilities.size() != after.size()) throw std::invalid_argument("check: probability count mismatch");
    InequalityCheck c;
    c.rhs = rhs;
    double avg_upper = 0.0, gaps = before.width();
    c.width = before.width();
    for (std::size_t k = 0; k < after.size(); ++k) {
        avg_upper += probabilities[k] * after[k].upper;
        c.width += probabilities[k] * after[k].width();
        gaps += after[k].width();
    }
    c.lhs = avg_upper - before.upper;
    c.slack = gaps + 1e-6;
    if (c.lhs > rhs + c.slack)
        c.verdict = Verdict::violation;
    else if (c.width <= kDecideTol || avg_upper - before.lower <= rhs + 1e-6)
        c.verdict = Verdict::pass;
    else
        c.verdict = Verdict::indeterminate;
    c.saturated = std::abs(c.lhs - rhs) <= c.width + kDecideTol;
    return c;
}

AuditRow audit_step(const BranchState& pre, const PureEnsemble& post, const Partition& split,
                    const OptimizerConfig& config) {
    split.check_covers(pre.state.layout());
    if (post.size() == 0 || !(post.layout() == pre.state.layout()))
        throw std::invalid_argument("audit_step: ensemble does not match the branch");
    const auto& head = split.blocks().front();
    const auto target = spectator_partition(split);
    auto bracket = [&](const PureState& s) {
        const auto r = ree(partial_trace(s, target.parties()), target, config);
        return ReeBracket{r.lower, r.upper, r.converged};
    };
    AuditRow row;
    row.record = pre.record;
    row.probability = pre.probability;
    const double s_pre = von_neumann_entropy(partial_trace(pre.state, head));
    double s_post = 0.0;
    std::vector<double> probs;
    std::vector<ReeBracket> after;
    for (const auto& m : post.members()) {
        probs.push_back(m.probability);
        s_post += m.probability * von_neumann_entropy(partial_trace(m.state, head));
        after.push_back(bracket(m.state));
    }
    row.entropy_drop = s_pre - s_post;
    row.entropy_ok = row.entropy_drop >= -1e-9;
    row.per_step = check_inequality(bracket(pre.state), probs, after, row.entropy_drop);
    return row;
}

ProtocolAudit audit_protocol(const LedgerReport& report, const Partition& split) {
    const auto& head = split.blocks().front();
    const auto gi = report.group_index(head);
    const auto ti = report.target_index(spectator_partition(split));
    std::vector<const LedgerRow*> ree_rows;
    for (const auto& r : report.rows)
        if (r.has_ree) ree_rows.push_back(&r);
    if (ree_rows.empty() || ree_rows.front()->row != 0 || ree_rows.back()->row + 1 != report.rows.size())
        throw std::invalid_argument("audit: ledger lacks initial and final E_r entries");

    ProtocolAudit audit;
    audit.split = split.to_string();
    const std::set<std::string> head_set(head.begin(), head.end());
    auto tally = [&](const InequalityCheck& c) {
        ++audit.ree_checks;
        if (c.verdict == Verdict::violation) ++audit.violations;
        if (c.verdict == Verdict::indeterminate) ++audit.indeterminate;
    };

    for (std::size_t s = 0; s + 1 < ree_rows.size(); ++s) {
        const auto& from = *ree_rows[s];
        const auto& to = *ree_rows[s + 1];
        bool head_measured = false;
        for (auto r = from.row + 1; r <= to.row; ++r) {
            const auto& row = report.rows[r];
            if (row.kind == ProtocolStep::Kind::measure && head_set.count(row.party)) head_measured = true;
        }
        for (const auto& pre : from.branches) {
            std::vector<double> probs;
            std::vector<ReeBracket> after;
            double s_post = 0.0;
            for (const auto& child : to.branches) {
                if (!has_prefix(child.record, pre.record)) continue;
                const double q = child.probability / pre.probability;
                probs.push_back(q);
                after.push_back(child.ree[ti]);
                s_post += q * child.entropy[gi];
            }
            AuditRow row;
            row.from_row = from.row;
            row.to_row = to.row;
            row.record = pre.record;
            row.probability = pre.probability;
            row.entropy_drop = pre.entropy[gi] - s_post;
            row.entropy_ok = row.entropy_drop >= -1e-9;
            if (!row.entropy_ok) ++audit.violations;
            row.per_step = check_inequality(pre.ree[ti], probs, after, row.entropy_drop);
            tally(row.per_step);
            if (!head_measured) {
                row.monotone = check_inequality(pre.ree[ti], probs, after, 0.0);
                tally(*row.monotone);
            }
            audit.rows.push_back(std::move(row));
        }
    }

    const auto& first = *ree_rows.front();
    const auto& last = *ree_rows.back();
    audit.initial_ree = first.branches.front().ree[ti];
    audit.final_ree = last.ree[ti];
    audit.initial_entropy = first.entropy[gi];
    audit.final_entropy = last.entropy[gi];
    std::vector<double> probs;
    std::vector<ReeBracket> after;
    for (const auto& b : last.branches) {
        probs.push_back(b.probability);
        after.push_back(b.ree[ti]);
    }
    audit.overall = check_inequality(audit.initial_ree, probs, after, audit.initial_entropy - audit.final_entropy);
    tally(audit.overall);

    auto& rev = audit.reversibility;
    rev.entropy_change = audit.final_entropy - audit.initial_entropy;
    rev.entropy_conserved = std::abs(rev.entropy_change) <= 1e-6;
    rev.ree_drift = audit.final_ree.upper - audit.initial_ree.upper;
    rev.drift_width = audit.overall.width;
    const double drift_lo = audit.final_ree.lower - audit.initial_ree.upper;
    const double drift_hi = audit.final_ree.upper - audit.initial_ree.lower;
    if (!rev.entropy_conserved)
        rev.verdict = "irreversible";
    else if (drift_lo > 1e-6 || drift_hi < -1e-6)
        rev.verdict = "irreversible";
    else if (rev.drift_width <= kDecideTol)
        rev.verdict = "conserved";
    else
        rev.verdict = "indeterminate";
    return audit;
}

// Fuzzing --------------------------------------------------------------------

Protocol random_protocol(const PartyLayout& layout, int rounds, std::uint64_t seed) {
    if (rounds < 1) throw std::invalid_argument("random_protocol: rounds must be >= 1");
    Rng rng(seed);
    Protocol p;
    p.name = "random-" + std::to_string(seed);
    p.initial = random_pure_state(layout, rng);
    const auto& parties = layout.parties();
    auto pick = [&]() { return parties[rng() % parties.size()]; };
    for (int r = 0; r < rounds; ++r) {
        const auto u = pick();
        p.steps.push_back(ProtocolStep::unitary(u, GateSpec::custom(random_unitary(layout.local_dim(u), rng))));
        const auto m = pick();
        const auto d = layout.local_dim(m);
        const std::size_t outcomes = d == 2 ? 2 : 2 + rng() % 2;
        const auto pm = random_projective_measurement(m, d, outcomes, rng);
        const auto at = p.steps.size();
        p.steps.push_back(ProtocolStep::measurement(m, BasisSpec{"custom", pm.projectors(), pm.labels()}));
        for (const auto& label : pm.labels()) {
            const auto c = pick();
            p.steps.push_back(ProtocolStep::unitary(c, GateSpec::custom(random_unitary(layout.local_dim(c), rng)),
                                                    {}, {{at, label}}));
        }
        p.steps.back().audit = true;
    }
    return p;
}

}  // namespace entacc
