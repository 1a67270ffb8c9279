#include <cmath>

#include <gtest/gtest.h>

#include "entacc/random.hpp"
#include "entacc/separable.hpp"

using namespace entacc;

TEST(Partition, ParseAndPrint) {
    const auto p = Partition::parse("A|B,C");
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.blocks()[1], (std::vector<std::string>{"B", "C"}));
    EXPECT_EQ(p.to_string(), "A|B,C");
    EXPECT_EQ(Partition::finest({"A", "B", "C"}).to_string(), "A|B|C");
    EXPECT_ANY_THROW(Partition::parse("A"));
    EXPECT_ANY_THROW(Partition::parse("A|A"));
    EXPECT_ANY_THROW(Partition::parse("A||B"));
    EXPECT_ANY_THROW(Partition::parse("A|B").check_covers(PartyLayout::qubits({"A", "B", "C"})));
}

TEST(Config, Validation) {
    OptimizerConfig c;
    EXPECT_NO_THROW(c.validate());
    c.gap_tol = 0.0;
    EXPECT_ANY_THROW(c.validate());
    c = {};
    c.max_iters = 0;
    EXPECT_ANY_THROW(c.validate());
}

TEST(ProductVector, MatchesKroneckerOrder) {
    const auto layout = PartyLayout::qubits({"A", "B"});
    ProductAtom atom;
    Vector zero = Vector::Zero(2), plus = Vector::Constant(2, 1.0 / std::sqrt(2.0));
    zero(0) = 1.0;
    atom.factors = {zero, plus};
    const auto v = product_vector(layout, Partition::parse("A|B"), atom);
    EXPECT_NEAR(v(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(v(1).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(v(2)), 0.0, 1e-15);
}

TEST(Ree, Singlet) {
    const auto r = ree(DensityMatrix(make_named_state("singlet")), Partition::parse("A|B"));
    EXPECT_NEAR(r.upper, 1.0, 1e-3);
    EXPECT_LE(r.lower, r.upper);
    EXPECT_LE(r.lower, 1.0 + 1e-9);
    EXPECT_TRUE(r.converged);
}

TEST(Ree, GhzPairIsSeparable) {
    const auto r = ree(partial_trace(ghz_state(3), {"B", "C"}), Partition::parse("B|C"));
    EXPECT_LE(r.upper, 1e-3);
    EXPECT_GE(r.lower, -1e-9);
}

TEST(Ree, ProductStateIsZero) {
    const auto r = ree(DensityMatrix(product_zero(PartyLayout::qubits({"A", "B", "C"}))),
                       Partition::finest({"A", "B", "C"}));
    EXPECT_LE(r.upper, 1e-6);
}

TEST(Ree, BellDiagonalClosedForm) {
    for (double l : {0.6, 0.75, 0.9}) {
        const auto rho = partial_trace(phi2_state(std::sqrt(l)), {"B", "C"});
        const auto r = ree(rho, Partition::parse("B|C"));
        EXPECT_NEAR(r.upper, 1.0 - binary_entropy(l), 5e-3) << l;
        EXPECT_LE(r.lower, 1.0 - binary_entropy(l) + 1e-6) << l;
    }
}

TEST(Ree, PureStatesMatchEntanglementEntropy) {
    Rng rng(21);
    for (auto dims : {std::vector<std::vector<std::size_t>>{{2}, {2}}, {{2}, {3}}}) {
        for (int t = 0; t < 3; ++t) {
            const PartyLayout layout({"A", "B"}, dims);
            const auto psi = random_pure_state(layout, rng);
            const double s = von_neumann_entropy(partial_trace(psi, {"A"}));
            const auto r = ree(DensityMatrix(psi), Partition::parse("A|B"));
            EXPECT_NEAR(r.upper, s, 5e-3);
            EXPECT_LE(r.lower, s + 1e-6);
        }
    }
}

TEST(Ree, BracketIsConsistentAndTraceDecreases) {
    Rng rng(4);
    const auto rho = random_density_matrix(PartyLayout::qubits({"A", "B"}), 2, rng);
    const auto r = ree(rho, Partition::parse("A|B"));
    EXPECT_LE(r.lower, r.upper + 1e-12);
    ASSERT_FALSE(r.upper_trace.empty());
    for (std::size_t i = 1; i < r.upper_trace.size(); ++i) EXPECT_LE(r.upper_trace[i], r.upper_trace[i - 1] + 1e-12);
    EXPECT_NEAR(relative_entropy(rho, r.model.assemble()), r.upper, 1e-9);
}

TEST(Ree, ModelIsAValidSeparableState) {
    const auto r = ree(DensityMatrix(make_named_state("singlet")), Partition::parse("A|B"));
    double total = 0.0;
    for (double w : r.model.weights()) {
        EXPECT_GE(w, 0.0);
        total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const auto sigma = r.model.assemble().matrix();
    EXPECT_NEAR(sigma.trace().real(), 1.0, 1e-12);
    EXPECT_GE(hermitian_eigenvalues(sigma).minCoeff(), -1e-12);
}

TEST(Ree, SeedDeterminism) {
    Rng rng(8);
    const auto rho = random_density_matrix(PartyLayout::qubits({"A", "B", "C"}), 2, rng);
    OptimizerConfig c;
    c.seed = 17;
    const auto a = ree(rho, Partition::finest({"A", "B", "C"}), c);
    const auto b = ree(rho, Partition::finest({"A", "B", "C"}), c);
    EXPECT_EQ(a.upper, b.upper);
    EXPECT_EQ(a.lower, b.lower);
}

TEST(Ree, CoarserPartitionGivesSmallerValue) {
    Rng rng(13);
    const auto layout = PartyLayout::qubits({"A", "B", "C"});
    for (int t = 0; t < 3; ++t) {
        const auto rho = random_density_matrix(layout, 2, rng);
        const auto fine = ree(rho, Partition::finest({"A", "B", "C"}));
        const auto coarse = ree(rho, Partition::parse("A|B,C"));
        EXPECT_LE(coarse.lower, fine.upper + 1e-6);
    }
}

TEST(Ree, UnionOfPartitionsIsBelowEach) {
    const auto rho = DensityMatrix(ghz_state(3));
    const std::vector<Partition> parts{Partition::parse("A|B,C"), Partition::parse("B|A,C")};
    const auto both = ree(rho, parts);
    const auto one = ree(rho, parts[0]);
    EXPECT_LE(both.lower, one.upper + 1e-6);
    EXPECT_NEAR(one.upper, 1.0, 1e-3);
}

TEST(Ree, RejectsMismatchedPartition) {
    EXPECT_ANY_THROW(ree(DensityMatrix(make_named_state("singlet")), Partition::parse("A|C")));
}

TEST(Lmo, FindsProductMinimum) {
    Matrix g = Matrix::Identity(4, 4);
    g(0, 0) = -3.0;
    const auto r = lmo_product_atom(g, PartyLayout::qubits({"A", "B"}), Partition::parse("A|B"), 4, 1);
    EXPECT_NEAR(r.value, -3.0, 1e-9);
}

TEST(Donald, IdentityOnRandomEnsembles) {
    Rng rng(1);
    const auto layout = PartyLayout::qubits({"A", "B"});
    for (int t = 0; t < 10; ++t) {
        std::vector<EnsembleMember<DensityMatrix>> members;
        std::uniform_real_distribution<double> u(0.1, 1.0);
        double total = 0.0;
        for (int k = 0; k < 3 + t % 3; ++k) {
            const double w = u(rng);
            total += w;
            members.push_back({w, random_density_matrix(layout, 2, rng)});
        }
        for (auto& m : members) m.probability /= total;
        const auto sigma = random_density_matrix(layout, 4, rng);
        EXPECT_LE(donald_identity_residual(MixedEnsemble(members), sigma), 1e-9);
    }
}

TEST(Monotonicity, LocalMeasurementsDoNotIncreaseRee) {
    const auto rho = partial_trace(phi2_state(std::sqrt(0.8)), {"B", "C"});
    LocalChannel channel;
    LocalOp op;
    op.kind = LocalOp::Kind::random_measurement;
    op.party = "B";
    channel.ops.push_back(op);
    const auto report = er_monotonicity_probe(rho, Partition::parse("B|C"), channel, 4, 3);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.trials.size(), 4u);
}
