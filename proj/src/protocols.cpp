#include "entacc/protocols.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "entacc/entropy.hpp"

namespace entacc {

namespace {

std::uint64_t binomial(int n, int k) {
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return c;
}

void check_alpha(double alpha, int n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("concentrate_phi1: alpha must lie in (0, 1)");
    if (n < 1 || n > 8) throw std::domain_error("concentrate_phi1: n_copies must lie in [1, 8]");
}

// Teleport Bob's qubit `source` through the singlet half `link` to `receiver`,
// then return Bob's measured pair to |00>.
void teleport(Protocol& p, std::size_t source, std::size_t link, const std::string& receiver) {
    const auto at = p.steps.size();
    p.steps.push_back(ProtocolStep::measurement("B", {"bell_basis", {}, {}}, {source, link}));
    auto on = [&](const std::string& label) { return std::vector<Outcome>{{at, label}}; };
    p.steps.push_back(ProtocolStep::unitary(receiver, {"Z", {}, {}}, {}, on("phi-")));
    p.steps.push_back(ProtocolStep::unitary(receiver, {"X", {}, {}}, {}, on("psi+")));
    p.steps.push_back(ProtocolStep::unitary(receiver, {"X", {}, {}}, {}, on("psi-")));
    p.steps.push_back(ProtocolStep::unitary(receiver, {"Z", {}, {}}, {}, on("psi-")));

    p.steps.push_back(ProtocolStep::unitary("B", {"CNOT", {}, {}}, {source, link}));
    p.steps.push_back(ProtocolStep::unitary("B", {"H", {}, {}}, {source}));
    for (const auto* label : {"phi-", "psi-"})
        p.steps.push_back(ProtocolStep::unitary("B", {"X", {}, {}}, {source}, on(label)));
    for (const auto* label : {"psi+", "psi-"})
        p.steps.push_back(ProtocolStep::unitary("B", {"X", {}, {}}, {link}, on(label)));
}

}  // namespace

Protocol ghz3_to_bc_singlet(std::vector<std::size_t> alice_subsystems, std::vector<std::size_t> bob_subsystems) {
    Protocol p;
    p.name = "ghz3_to_bc_singlet";
    p.initial = ghz_state(3);
    p.steps.push_back(ProtocolStep::measurement("A", {"x_basis", {}, {}}, std::move(alice_subsystems)));
    p.steps.push_back(ProtocolStep::unitary("B", {"Z", {}, {}}, std::move(bob_subsystems), {{0, "-"}}));
    p.steps.back().audit = true;
    return p;
}

Protocol two_singlets_to_ghz() {
    const auto ab = make_named_state("singlet", {}, {"A", "B"});
    const auto bc = make_named_state("singlet", {}, {"B", "C"});
    Protocol p;
    p.name = "two_singlets_to_ghz";
    p.initial = tensor_product(ab, bc);
    // Bob: 0 = half of the A-B singlet, 1 = half of the B-C singlet,
    // 2, 3, 4 = the local GHZ.
    for (int i = 0; i < 3; ++i) p.steps.push_back(ProtocolStep::ancilla("B"));
    p.steps.push_back(ProtocolStep::unitary("B", {"H", {}, {}}, {2}));
    p.steps.push_back(ProtocolStep::unitary("B", {"CNOT", {}, {}}, {2, 3}));
    p.steps.push_back(ProtocolStep::unitary("B", {"CNOT", {}, {}}, {2, 4}));
    teleport(p, 2, 0, "A");
    teleport(p, 4, 1, "C");
    p.steps.push_back(ProtocolStep::unitary("B", {"SWAP", {}, {}}, {0, 3}));
    p.steps.back().audit = true;
    return p;
}

PureState two_singlets_to_ghz_target() {
    auto s = ghz_state(3);
    for (int i = 0; i < 4; ++i) s = attach_ancilla(s, "B", 2);
    return s;
}

std::vector<ConcentrationOutcome> concentrate_phi1(double alpha, int n_copies) {
    check_alpha(alpha, n_copies);
    const double a2 = alpha * alpha;
    const double b2 = 1.0 - a2;
    std::vector<ConcentrationOutcome> out;
    for (int k = 0; k <= n_copies; ++k) {
        ConcentrationOutcome o;
        o.weight = k;
        o.rank = binomial(n_copies, k);
        o.probability = static_cast<double>(o.rank) * std::pow(a2, n_copies - k) * std::pow(b2, k);
        o.ghz_yield_bits = std::log2(static_cast<double>(o.rank));
        out.push_back(o);
    }
    return out;
}

double expected_yield(const std::vector<ConcentrationOutcome>& outcomes) {
    double y = 0.0;
    for (const auto& o : outcomes) y += o.probability * o.ghz_yield_bits;
    return y;
}

DenseConcentration concentrate_phi1_dense(double alpha, int n_copies) {
    check_alpha(alpha, n_copies);
    if (n_copies > 4) throw std::domain_error("concentrate_phi1_dense: at most 4 copies");
    auto state = phi1_state(alpha);
    for (int i = 1; i < n_copies; ++i) state = tensor_product(state, phi1_state(alpha));

    const auto n = static_cast<unsigned>(n_copies);
    const auto local = Eigen::Index{1} << n;
    std::vector<Matrix> projectors(n + 1, Matrix::Zero(local, local));
    std::vector<std::string> labels;
    for (Eigen::Index s = 0; s < local; ++s) projectors[std::popcount(static_cast<unsigned>(s))](s, s) = 1.0;
    for (unsigned k = 0; k <= n; ++k) labels.push_back(std::to_string(k));
    const ProjectiveMeasurement weight("A", projectors, labels);

    DenseConcentration out;
    for (const auto& o : measure_outcomes(state, weight)) {
        ConcentrationOutcome c;
        c.weight = std::stoi(o.label);
        c.probability = o.probability;
        c.ghz_yield_bits = von_neumann_entropy(partial_trace(o.state, {"A"}));
        c.rank = static_cast<std::uint64_t>(std::llround(std::exp2(c.ghz_yield_bits)));
        out.expected_yield += c.probability * c.ghz_yield_bits;

        // Strings are spread over A, B, C: joint index s * local^2 + s * local + s.
        Vector expected = Vector::Zero(o.state.amplitudes().size());
        for (Eigen::Index s = 0; s < local; ++s)
            if (std::popcount(static_cast<unsigned>(s)) == c.weight) expected[(s * local + s) * local + s] = 1.0;
        expected.normalize();
        const double f = std::norm(expected.dot(o.state.amplitudes()));
        out.max_state_error = std::max(out.max_state_error, 1.0 - f);
        out.outcomes.push_back(c);
    }
    return out;
}

}  // namespace entacc
