#include <cmath>

#include <gtest/gtest.h>

#include "entacc/protocols.hpp"
#include "entacc/random.hpp"

using namespace entacc;

namespace {

Protocol ghz_measure_only() {
    Protocol p;
    p.name = "measure A";
    p.initial = ghz_state(3);
    p.steps.push_back(ProtocolStep::measurement("A", {"computational", {}, {}}));
    return p;
}

}  // namespace

TEST(Gates, NamedGatesAreUnitary) {
    for (const char* name : {"I", "H", "X", "Y", "Z", "S"}) EXPECT_TRUE(is_unitary(resolve_gate({name, {}, {}}, 2))) << name;
    EXPECT_TRUE(is_unitary(resolve_gate({"Ry", {0.3}, {}}, 2)));
    EXPECT_TRUE(is_unitary(resolve_gate({"phase", {1.1}, {}}, 2)));
    EXPECT_TRUE(is_unitary(resolve_gate({"diag", {0.1, 0.2, 0.3}, {}}, 3)));
    EXPECT_TRUE(is_unitary(resolve_gate({"CNOT", {}, {}}, 4)));
    EXPECT_TRUE(is_unitary(resolve_gate({"SWAP", {}, {}}, 4)));
    EXPECT_ANY_THROW(resolve_gate({"CNOT", {}, {}}, 2));
    EXPECT_ANY_THROW(resolve_gate({"nope", {}, {}}, 2));
    EXPECT_ANY_THROW(resolve_gate(GateSpec::custom(Matrix::Ones(2, 2)), 2));
}

TEST(Gates, CnotActsOnSecondQubit) {
    const auto c = resolve_gate({"CNOT", {}, {}}, 4);
    EXPECT_NEAR(std::abs(c(3, 2)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(c(0, 0)), 1.0, 1e-15);
}

TEST(Basis, BellBasisLabels) {
    const auto m = resolve_basis({"bell_basis", {}, {}}, "B", {2, 2}, {0, 1});
    EXPECT_EQ(m.labels(), (std::vector<std::string>{"phi+", "phi-", "psi+", "psi-"}));
    Matrix sum = Matrix::Zero(4, 4);
    for (const auto& p : m.projectors()) sum += p;
    EXPECT_LT((sum - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_ANY_THROW(resolve_basis({"bell_basis", {}, {}}, "B", {2}, {0}));
}

TEST(Protocol, ValidationCatchesBadSteps) {
    auto p = ghz_measure_only();
    p.steps.push_back(ProtocolStep::unitary("Z", {"X", {}, {}}));
    EXPECT_ANY_THROW(p.validate());

    p = ghz_measure_only();
    p.steps.push_back(ProtocolStep::unitary("B", {"X", {}, {}}, {}, {{0, "7"}}));
    EXPECT_ANY_THROW(p.validate());

    p = ghz_measure_only();
    p.steps.push_back(ProtocolStep::unitary("B", {"X", {}, {}}, {}, {{5, "0"}}));
    EXPECT_ANY_THROW(p.validate());

    p = ghz_measure_only();
    p.steps.push_back(ProtocolStep::unitary("B", {"X", {}, {}}, {3}));
    EXPECT_ANY_THROW(p.validate());

    p = ghz_measure_only();
    p.initial = PureState(ghz_state(3).layout().with_max_dim(8), ghz_state(3).amplitudes());
    p.steps.push_back(ProtocolStep::ancilla("B"));
    EXPECT_ANY_THROW(p.validate());
}

TEST(Protocol, LayoutsTrackAncillas) {
    auto p = ghz_measure_only();
    p.steps.push_back(ProtocolStep::ancilla("C", 3));
    const auto layouts = p.layouts();
    ASSERT_EQ(layouts.size(), 3u);
    EXPECT_EQ(layouts.back().local_dim("C"), 6u);
}

TEST(Run, ProbabilitiesSumToOne) {
    Rng rng(0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = random_protocol(PartyLayout::qubits({"A", "B", "C"}), 2, seed);
        RunOptions o;
        o.ree_at_ends = false;
        const auto r = run(p, o);
        double total = 0.0;
        for (const auto& leaf : r.leaves) total += leaf.probability;
        EXPECT_NEAR(total, 1.0, 1e-12);
        for (const auto& row : r.ledger.rows) EXPECT_NEAR(row.total_probability, 1.0, 1e-9);
    }
}

TEST(Run, MeasuringGhzGivesProductBranches) {
    const auto r = run(ghz_measure_only());
    ASSERT_EQ(r.leaves.size(), 2u);
    EXPECT_EQ(r.leaves[0].record, (std::vector<Outcome>{{0, "0"}}));
    const auto& last = r.ledger.rows.back();
    EXPECT_NEAR(last.entropy[r.ledger.group_index({"B"})], 0.0, 1e-12);
    EXPECT_NEAR(r.ledger.rows.front().ledger_ebits, 1.5, 1e-12);
    EXPECT_NEAR(last.ledger_ebits, 0.0, 1e-12);
}

TEST(Run, UnmetConditionsPassThrough) {
    auto p = ghz_measure_only();
    p.steps.push_back(ProtocolStep::unitary("B", {"X", {}, {}}, {}, {{0, "1"}}));
    const auto r = run(p);
    for (const auto& leaf : r.leaves) {
        // Both branches end in |b b> on B,C: leaf 0 untouched, leaf 1 flipped on B.
        const auto bc = partial_trace(leaf.state, {"B", "C"}).matrix();
        if (leaf.record[0].label == "0") EXPECT_NEAR(bc(0, 0).real(), 1.0, 1e-12);
        else EXPECT_NEAR(bc(1, 1).real(), 1.0, 1e-12);
    }
}

TEST(Run, BranchCapIsEnforced) {
    const auto p = random_protocol(PartyLayout::qubits({"A", "B", "C"}), 3, 2);
    RunOptions o;
    o.max_branches = 2;
    o.ree_at_ends = false;
    EXPECT_ANY_THROW(run(p, o));
}

TEST(Run, TargetsFollowSplits) {
    RunOptions o;
    o.splits = {Partition::parse("A|B,C"), Partition::parse("A|B|C")};
    const auto r = run(ghz3_to_bc_singlet(), o);
    EXPECT_EQ(r.ledger.targets[0].to_string(), "B|C");
    EXPECT_EQ(spectator_partition(Partition::parse("A|B|C,D")).to_string(), "B|C,D");
    EXPECT_NO_THROW(r.ledger.group_index({"A"}));
}

TEST(Concat, ShiftsConditions) {
    const auto joined = concat(ghz_measure_only(), ghz3_to_bc_singlet());
    ASSERT_EQ(joined.steps.size(), 3u);
    EXPECT_EQ(joined.steps[2].condition[0].step, 1u);
    EXPECT_NO_THROW(joined.validate());
}

TEST(Check, DecisionRule) {
    const ReeBracket tight{1.0, 1.0 + 1e-7, true};
    const ReeBracket zero{0.0, 1e-7, true};
    auto c = check_inequality(zero, {1.0}, {tight}, 1.0);
    EXPECT_EQ(c.verdict, Verdict::pass);
    EXPECT_TRUE(c.saturated);
    c = check_inequality(zero, {1.0}, {tight}, 0.5);
    EXPECT_EQ(c.verdict, Verdict::violation);
    const ReeBracket wide{0.0, 0.6, false};
    c = check_inequality(zero, {1.0}, {wide}, 0.1);
    EXPECT_EQ(c.verdict, Verdict::indeterminate);
    EXPECT_EQ(to_string(Verdict::indeterminate), "indeterminate");
}

TEST(Audit, RandomProtocolsPass) {
    OptimizerConfig cfg;
    cfg.gap_tol = 1e-4;
    cfg.max_iters = 400;
    for (std::uint64_t seed = 100; seed < 103; ++seed) {
        const auto p = random_protocol(PartyLayout::qubits({"A", "B", "C"}), 2, seed);
        RunOptions o;
        o.ree_config = cfg;
        o.splits = {Partition::parse("A|B,C"), Partition::parse("C|A,B")};
        const auto r = run(p, o);
        for (const auto& s : o.splits) {
            const auto a = audit_protocol(r.ledger, s);
            EXPECT_EQ(a.violations, 0);
            EXPECT_GT(a.ree_checks, 0);
            for (const auto& row : a.rows) EXPECT_TRUE(row.entropy_ok);
        }
    }
}

TEST(Audit, RequiresReeRows) {
    RunOptions o;
    o.splits = {Partition::parse("A|B,C")};
    o.ree_at_ends = false;
    const auto r = run(ghz_measure_only(), o);
    EXPECT_ANY_THROW(audit_protocol(r.ledger, Partition::parse("A|B,C")));
}

TEST(RandomProtocol, DeterministicAndWellFormed) {
    const auto layout = PartyLayout({"A", "B", "C"}, {{2, 2}, {2}, {2}});
    const auto a = random_protocol(layout, 3, 42);
    const auto b = random_protocol(layout, 3, 42);
    EXPECT_EQ(a.initial.amplitudes(), b.initial.amplitudes());
    EXPECT_EQ(a.steps.size(), b.steps.size());
    EXPECT_NO_THROW(a.validate());
    EXPECT_ANY_THROW(random_protocol(layout, 0, 1));
}
