#include "entacc/json_io.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace entacc {

namespace {

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex entries are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    if (!j.is_object()) throw std::invalid_argument(what + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw std::invalid_argument(what + ": unknown key '" + key + "'");
}

Json record_to_json(const std::vector<Outcome>& record) {
    Json out = Json::array();
    for (const auto& o : record) out.push_back({{"step", o.step}, {"label", o.label}});
    return out;
}

const char* kind_name(ProtocolStep::Kind k) {
    switch (k) {
        case ProtocolStep::Kind::local_unitary: return "local_unitary";
        case ProtocolStep::Kind::measure: return "measure";
        case ProtocolStep::Kind::attach_ancilla: return "attach_ancilla";
    }
    return "?";
}

Json check_to_json(const InequalityCheck& c) {
    return {{"lhs", c.lhs}, {"rhs", c.rhs}, {"width", c.width}, {"slack", c.slack}, {"verdict", to_string(c.verdict)},
            {"saturated", c.saturated}};
}

}  // namespace

// States ---------------------------------------------------------------------

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("matrix rows must have equal length");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

Json state_to_json(const PureState& state) {
    Json layout = Json::object();
    const auto& l = state.layout();
    for (std::size_t i = 0; i < l.party_count(); ++i) layout[l.parties()[i]] = l.dims()[i];
    Json amps = Json::array();
    for (Eigen::Index k = 0; k < state.amplitudes().size(); ++k) amps.push_back(complex_to_json(state.amplitudes()[k]));
    return {{"layout", std::move(layout)}, {"amplitudes", std::move(amps)}};
}

PureState state_from_json(const Json& j, std::size_t max_dim) {
    if (j.is_string()) return state_from_json(Json{{"name", j}}, max_dim);
    if (j.contains("name")) {
        reject_unknown(j, {"name", "params", "labels"}, "state");
        const auto params = j.value("params", std::vector<double>{});
        const auto labels = j.value("labels", std::vector<std::string>{});
        auto s = make_named_state(j.at("name").get<std::string>(), params, labels);
        return PureState(s.layout().with_max_dim(max_dim), s.amplitudes());
    }
    reject_unknown(j, {"layout", "amplitudes"}, "state");
    std::vector<std::string> parties;
    std::vector<std::vector<std::size_t>> dims;
    for (const auto& [party, d] : j.at("layout").items()) {
        parties.push_back(party);
        dims.push_back(d.get<std::vector<std::size_t>>());
    }
    PartyLayout layout(std::move(parties), std::move(dims), max_dim);
    const auto& a = j.at("amplitudes");
    if (!a.is_array() || a.size() != layout.total_dim())
        throw std::invalid_argument("state: expected " + std::to_string(layout.total_dim()) + " amplitudes");
    Vector amps(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) amps[static_cast<Eigen::Index>(k)] = complex_from_json(a[k]);
    // Hand-written files carry rounded amplitudes.
    if (const double norm = amps.norm(); std::abs(norm - 1.0) > 1e-12 && std::abs(norm - 1.0) <= 1e-6) amps /= norm;
    return PureState(std::move(layout), std::move(amps));
}

// Protocols ------------------------------------------------------------------

Json protocol_to_json(const Protocol& p) {
    Json steps = Json::array();
    for (const auto& s : p.steps) {
        Json step = {{"kind", kind_name(s.kind)}, {"party", s.party}};
        if (!s.subsystems.empty()) step["subsystems"] = s.subsystems;
        Json payload = Json::object();
        switch (s.kind) {
            case ProtocolStep::Kind::local_unitary:
                payload["gate"] = s.gate.name;
                if (!s.gate.params.empty()) payload["params"] = s.gate.params;
                if (s.gate.name == "custom") payload["matrix"] = matrix_to_json(s.gate.matrix);
                break;
            case ProtocolStep::Kind::measure:
                payload["basis"] = s.basis.name;
                if (s.basis.name == "custom") {
                    Json projectors = Json::array();
                    for (const auto& m : s.basis.projectors) projectors.push_back(matrix_to_json(m));
                    payload["projectors"] = std::move(projectors);
                    payload["labels"] = s.basis.labels;
                }
                break;
            case ProtocolStep::Kind::attach_ancilla:
                payload["dim"] = s.ancilla_dim;
                break;
        }
        step["payload"] = std::move(payload);
        if (!s.condition.empty()) step["condition"] = record_to_json(s.condition);
        if (s.audit) step["audit"] = true;
        steps.push_back(std::move(step));
    }
    return {{"name", p.name}, {"initial", state_to_json(p.initial)}, {"steps", std::move(steps)}};
}

Protocol protocol_from_json(const Json& j, std::size_t max_dim) {
    reject_unknown(j, {"name", "initial", "steps"}, "protocol");
    Protocol p;
    p.name = j.value("name", std::string("protocol"));
    p.initial = state_from_json(j.at("initial"), max_dim);
    for (const auto& js : j.at("steps")) {
        reject_unknown(js, {"kind", "party", "subsystems", "payload", "condition", "audit"}, "step");
        ProtocolStep s;
        const auto kind = js.at("kind").get<std::string>();
        s.party = js.at("party").get<std::string>();
        s.subsystems = js.value("subsystems", std::vector<std::size_t>{});
        s.audit = js.value("audit", false);
        const auto payload = js.value("payload", Json::object());
        if (kind == "local_unitary" || kind == "unitary") {
            s.kind = ProtocolStep::Kind::local_unitary;
            reject_unknown(payload, {"gate", "params", "matrix"}, "unitary payload");
            s.gate.name = payload.at("gate").get<std::string>();
            s.gate.params = payload.value("params", std::vector<double>{});
            if (payload.contains("matrix")) s.gate.matrix = matrix_from_json(payload.at("matrix"));
        } else if (kind == "measure") {
            s.kind = ProtocolStep::Kind::measure;
            reject_unknown(payload, {"basis", "projectors", "labels"}, "measurement payload");
            s.basis.name = payload.value("basis", std::string(payload.contains("projectors") ? "custom" : "computational"));
            if (payload.contains("projectors"))
                for (const auto& m : payload.at("projectors")) s.basis.projectors.push_back(matrix_from_json(m));
            s.basis.labels = payload.value("labels", std::vector<std::string>{});
        } else if (kind == "attach_ancilla") {
            s.kind = ProtocolStep::Kind::attach_ancilla;
            reject_unknown(payload, {"dim"}, "ancilla payload");
            s.ancilla_dim = payload.value("dim", std::size_t{2});
        } else {
            throw std::invalid_argument("unknown step kind: " + kind);
        }
        if (js.contains("condition"))
            for (const auto& c : js.at("condition"))
                s.condition.push_back({c.at("step").get<std::size_t>(), c.at("label").get<std::string>()});
        p.steps.push_back(std::move(s));
    }
    p.validate();
    return p;
}

// Optimizer ------------------------------------------------------------------

Json config_to_json(const OptimizerConfig& c) {
    Json parts = Json::array();
    for (const auto& p : c.partitions) parts.push_back(p.to_string());
    return {{"gap_tol", c.gap_tol},   {"max_iters", c.max_iters}, {"restarts", c.restarts},
            {"seed", c.seed},         {"epsilon", c.epsilon},     {"partitions", std::move(parts)},
            {"max_atoms", c.max_atoms}};
}

OptimizerConfig config_from_json(const Json& j) {
    reject_unknown(j, {"gap_tol", "max_iters", "restarts", "seed", "epsilon", "partitions", "max_atoms"}, "config");
    OptimizerConfig c;
    c.gap_tol = j.value("gap_tol", c.gap_tol);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.restarts = j.value("restarts", c.restarts);
    c.seed = j.value("seed", c.seed);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.max_atoms = j.value("max_atoms", c.max_atoms);
    if (j.contains("partitions"))
        for (const auto& p : j.at("partitions")) c.partitions.push_back(Partition::parse(p.get<std::string>()));
    c.validate();
    return c;
}

Json bracket_to_json(const ReeBracket& b) {
    return {{"lower", b.lower}, {"upper", b.upper}, {"width", b.width()}, {"converged", b.converged}};
}

Json ree_to_json(const REEResult& r) {
    Json partitions = Json::array();
    for (const auto& p : r.model.partitions()) partitions.push_back(p.to_string());
    Json atoms = Json::array();
    for (std::size_t i = 0; i < r.model.atoms().size(); ++i) {
        const auto& a = r.model.atoms()[i];
        Json factors = Json::array();
        for (const auto& f : a.factors) {
            Json v = Json::array();
            for (Eigen::Index k = 0; k < f.size(); ++k) v.push_back(complex_to_json(f[k]));
            factors.push_back(std::move(v));
        }
        atoms.push_back({{"weight", r.model.weights()[i]}, {"partition", a.partition_index}, {"factors", std::move(factors)}});
    }
    return {{"upper", r.upper},
            {"lower", r.lower},
            {"gap", r.gap()},
            {"iterations", r.iterations},
            {"restarts_used", r.restarts_used},
            {"converged", r.converged},
            {"model", {{"partitions", std::move(partitions)}, {"atoms", std::move(atoms)}}}};
}

// Ledgers and audits ---------------------------------------------------------

Json ledger_to_json(const LedgerReport& report, bool with_branches) {
    Json groups = Json::array();
    for (const auto& g : report.groups) {
        std::string name;
        for (const auto& p : g) name += p;
        groups.push_back(name);
    }
    Json targets = Json::array();
    for (const auto& t : report.targets) targets.push_back(t.to_string());
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        Json row = {{"row", r.row},
                    {"step", r.description},
                    {"branches", r.branches.size()},
                    {"total_probability", r.total_probability},
                    {"entropy", r.entropy},
                    {"ledger_ebits", r.ledger_ebits}};
        if (r.has_ree) {
            Json ree = Json::array();
            for (const auto& b : r.ree) ree.push_back(bracket_to_json(b));
            row["ree"] = std::move(ree);
        }
        if (with_branches) {
            Json detail = Json::array();
            for (const auto& b : r.branches) {
                Json d = {{"record", record_to_json(b.record)}, {"probability", b.probability}, {"entropy", b.entropy}};
                if (!b.ree.empty()) {
                    Json ree = Json::array();
                    for (const auto& x : b.ree) ree.push_back(bracket_to_json(x));
                    d["ree"] = std::move(ree);
                }
                detail.push_back(std::move(d));
            }
            row["detail"] = std::move(detail);
        }
        rows.push_back(std::move(row));
    }
    return {{"protocol", report.protocol}, {"parties", report.parties}, {"groups", std::move(groups)},
            {"targets", std::move(targets)}, {"rows", std::move(rows)}};
}

Json audit_to_json(const ProtocolAudit& a) {
    Json rows = Json::array();
    for (const auto& r : a.rows) {
        Json row = {{"from_row", r.from_row},         {"to_row", r.to_row},
                    {"record", record_to_json(r.record)}, {"probability", r.probability},
                    {"entropy_drop", r.entropy_drop}, {"entropy_ok", r.entropy_ok},
                    {"per_step", check_to_json(r.per_step)}};
        if (r.monotone) row["monotone"] = check_to_json(*r.monotone);
        rows.push_back(std::move(row));
    }
    const auto& rev = a.reversibility;
    return {{"split", a.split},
            {"initial_ree", bracket_to_json(a.initial_ree)},
            {"final_ree", bracket_to_json(a.final_ree)},
            {"initial_entropy", a.initial_entropy},
            {"final_entropy", a.final_entropy},
            {"overall", check_to_json(a.overall)},
            {"reversibility",
             {{"entropy_conserved", rev.entropy_conserved},
              {"entropy_change", rev.entropy_change},
              {"ree_drift", rev.ree_drift},
              {"drift_width", rev.drift_width},
              {"verdict", rev.verdict}}},
            {"violations", a.violations},
            {"indeterminate", a.indeterminate},
            {"ree_checks", a.ree_checks},
            {"rows", std::move(rows)}};
}

// Accounting -----------------------------------------------------------------

Json profile_to_json(const EntropyProfile& p) {
    Json one = Json::object();
    for (std::size_t i = 0; i < p.parties.size(); ++i) one[p.parties[i]] = p.one_party[i];
    Json cuts = Json::array();
    for (const auto& c : p.bipartitions) cuts.push_back({{"side", c.side}, {"complement", c.complement}, {"entropy", c.entropy}});
    Json pairs = Json::object();
    for (const auto& r : p.pair_ree) pairs[r.first + r.second] = bracket_to_json(r.bracket);
    return {{"parties", p.parties}, {"one_party", std::move(one)}, {"bipartitions", std::move(cuts)}, {"pair_ree", std::move(pairs)}};
}

Json rates_to_json(const ExtractionSolution& s) {
    Json rates = Json::object();
    for (const auto& [pair, v] : s.s) rates[pair] = v;
    return {{"g", s.g},
            {"s", std::move(rates)},
            {"g_estimates", s.g_estimates},
            {"residual", s.residual},
            {"tolerance", s.tolerance},
            {"feasible", s.feasible}};
}

Json matching_to_json(const SingletMatchingResult& m) {
    Json constraints = Json::array();
    for (const auto& c : m.constraints) constraints.push_back({{"name", c.name}, {"coefficients", c.coefficients}, {"rhs", c.rhs}});
    Json out = {{"variables", m.variables},
                {"constraints", std::move(constraints)},
                {"feasible", m.feasible},
                {"one_party_total", m.one_party_total},
                {"cut_total", m.cut_total}};
    if (m.feasible) {
        Json sol = Json::object();
        for (std::size_t i = 0; i < m.variables.size(); ++i) sol[m.variables[i]] = m.solution[i];
        out["solution"] = std::move(sol);
        out["residual"] = m.residual;
    }
    if (m.certificate) {
        out["certificate"] = {{"multipliers", m.certificate->multipliers},
                              {"combined_rhs", m.certificate->combined_rhs},
                              {"max_combined_coefficient", m.certificate->max_combined_coefficient},
                              {"explanation", m.certificate->explanation}};
    }
    return out;
}

Json concentration_to_json(const std::vector<ConcentrationOutcome>& outcomes) {
    Json rows = Json::array();
    for (const auto& o : outcomes)
        rows.push_back({{"k", o.weight}, {"probability", o.probability}, {"rank", o.rank}, {"bits", o.ghz_yield_bits}});
    return rows;
}

Json ghz_scan_to_json(const GhzScanReport& r) {
    Json subsets = Json::array();
    for (const auto& s : r.subsets)
        subsets.push_back({{"parties", s.parties}, {"deviation", s.deviation}, {"sigma_upper", s.sigma_upper}});
    return {{"n", r.n},
            {"k", r.k},
            {"all_classical", r.all_classical},
            {"irreversible_to_k_party", r.irreversible_to_k_party},
            {"subsets", std::move(subsets)}};
}

}  // namespace entacc
