#include <cmath>

#include <gtest/gtest.h>

#include "entacc/entropy.hpp"
#include "entacc/random.hpp"

using namespace entacc;

namespace {

Matrix pauli_z() {
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
}

Matrix hadamard() {
    Matrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

std::vector<Matrix> computational_projectors() {
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    return {p0, p1};
}

}  // namespace

TEST(Layout, CanonicalOrderAndDims) {
    PartyLayout layout({"A", "B", "C"}, {{2}, {2, 3}, {2}});
    EXPECT_EQ(layout.total_dim(), 24u);
    EXPECT_EQ(layout.local_dim("B"), 6u);
    EXPECT_EQ(layout.subsystems_of("B"), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(layout.subsystem_dims(), (std::vector<std::size_t>{2, 2, 3, 2}));
    EXPECT_EQ(layout.restricted({"C", "A"}).parties(), (std::vector<std::string>{"A", "C"}));
    EXPECT_EQ(layout.with_ancilla("A", 2).local_dim("A"), 4u);
}

TEST(Layout, RejectsBadInput) {
    EXPECT_THROW(PartyLayout({"A", "A"}, {{2}, {2}}), std::invalid_argument);
    EXPECT_THROW(PartyLayout({"A"}, {{2}, {2}}), std::invalid_argument);
    EXPECT_THROW(PartyLayout({"A", "B"}, {{0}, {2}}), std::invalid_argument);
    EXPECT_ANY_THROW(PartyLayout::qubits({"A", "B", "C", "D", "E"}, 16));
    EXPECT_ANY_THROW(PartyLayout::qubits({"A"}).party_index("Z"));
}

TEST(States, NamedStatesAreNormalized) {
    for (const char* name : {"singlet", "psi_plus", "psi_minus"}) {
        const auto s = make_named_state(name);
        EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-14) << name;
        EXPECT_EQ(s.layout().party_count(), 2u);
    }
    const auto ghz = ghz_state(4);
    EXPECT_EQ(ghz.dim(), 16u);
    EXPECT_NEAR(std::abs(ghz.amplitudes()(0)), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(ghz.amplitudes()(15)), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW(ghz_state(1), std::invalid_argument);
}

TEST(States, SingletIsPhiPlus) {
    const auto s = make_named_state("singlet");
    EXPECT_NEAR(s.amplitudes()(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.amplitudes()(3).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(s.amplitudes()(1)), 0.0, 1e-15);
}

TEST(States, Phi2ReducesToBellDiagonal) {
    const double a2 = 0.75;
    const auto bc = partial_trace(phi2_state(std::sqrt(a2)), {"B", "C"}).matrix();
    EXPECT_NEAR(bc(0, 0).real(), 0.5, 1e-14);
    EXPECT_NEAR(bc(0, 3).real(), (a2 - (1.0 - a2)) / 2.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(bc), binary_entropy(a2), 1e-12);
}

TEST(States, TensorProductMergesSharedParty) {
    const auto ab = make_named_state("singlet", {}, {"A", "B"});
    const auto bc = make_named_state("singlet", {}, {"B", "C"});
    const auto joint = tensor_product(ab, bc);
    EXPECT_EQ(joint.layout().parties(), (std::vector<std::string>{"A", "B", "C"}));
    EXPECT_EQ(joint.layout().local_dim("B"), 4u);
    EXPECT_NEAR(von_neumann_entropy(partial_trace(joint, {"B"})), 2.0, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(partial_trace(joint, {"A"})), 1.0, 1e-12);
}

TEST(PartialTrace, GhzReductionsAreClassical) {
    const auto bc = partial_trace(ghz_state(3), {"B", "C"}).matrix();
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    EXPECT_LT((bc - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, PreservesTraceOnRandomStates) {
    Rng rng(11);
    PartyLayout layout({"A", "B", "C"}, {{2}, {3}, {2}});
    for (int t = 0; t < 10; ++t) {
        const auto rho = random_density_matrix(layout, 3, rng);
        const auto ab = partial_trace(rho, {"A", "B"});
        EXPECT_NEAR(ab.matrix().trace().real(), 1.0, 1e-12);
        const auto a1 = partial_trace(ab, {"A"}).matrix();
        const auto a2 = partial_trace(rho, {"A"}).matrix();
        EXPECT_LT((a1 - a2).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(LocalOps, UnitaryLeavesOtherReductionsAlone) {
    Rng rng(5);
    const auto layout = PartyLayout::qubits({"A", "B", "C"});
    const auto psi = random_pure_state(layout, rng);
    const auto moved = apply_local_unitary(psi, "B", random_unitary(2, rng));
    const auto before = partial_trace(psi, {"A", "C"}).matrix();
    const auto after = partial_trace(moved, {"A", "C"}).matrix();
    EXPECT_LT((before - after).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_THROW(apply_local_unitary(psi, "B", 2.0 * Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST(LocalOps, SubsystemTargeting) {
    auto psi = product_zero(PartyLayout({"A"}, {{2, 2}}));
    Matrix x = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    psi = apply_local_unitary(psi, "A", x, {1});
    EXPECT_NEAR(std::abs(psi.amplitudes()(1)), 1.0, 1e-15);
}

TEST(Measurement, ProbabilitiesAndLabels) {
    const auto ghz = ghz_state(3);
    std::vector<Matrix> projectors;
    const Matrix h = hadamard();
    for (auto p : computational_projectors()) projectors.push_back(h * p * h.adjoint());
    const auto outcomes = measure_outcomes(ghz, ProjectiveMeasurement("A", projectors, {"+", "-"}));
    ASSERT_EQ(outcomes.size(), 2u);
    EXPECT_EQ(outcomes[0].label, "+");
    EXPECT_EQ(outcomes[1].label, "-");
    for (const auto& o : outcomes) {
        EXPECT_NEAR(o.probability, 0.5, 1e-14);
        EXPECT_NEAR(von_neumann_entropy(partial_trace(o.state, {"A"})), 0.0, 1e-9);
    }
}

TEST(Measurement, ZeroProbabilityBranchesArePruned) {
    const auto psi = product_zero(PartyLayout::qubits({"A", "B"}));
    const auto ens = measure(psi, ProjectiveMeasurement("A", computational_projectors()));
    EXPECT_EQ(ens.size(), 1u);
    EXPECT_NEAR(ens.members()[0].probability, 1.0, 1e-15);
}

TEST(Measurement, RejectsIncompleteProjectors) {
    const auto projectors = computational_projectors();
    EXPECT_ANY_THROW(measure(ghz_state(2), ProjectiveMeasurement("A", {projectors[0]})));
}

TEST(Measurement, MixedAverageMatchesPureBranches) {
    Rng rng(2);
    const auto layout = PartyLayout::qubits({"A", "B"});
    const auto psi = random_pure_state(layout, rng);
    const auto m = random_projective_measurement("A", 2, 2, rng);
    const auto mixed = measure(DensityMatrix(psi), m);
    const auto avg = average(mixed);
    const auto marginal = partial_trace(psi, {"B"}).matrix();
    EXPECT_LT((partial_trace(DensityMatrix(layout, avg), {"B"}).matrix() - marginal).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Ancilla, AttachesZeroState) {
    const auto s = attach_ancilla(make_named_state("singlet"), "B", 3);
    EXPECT_EQ(s.layout().local_dim("B"), 6u);
    EXPECT_NEAR(von_neumann_entropy(partial_trace(s, {"A"})), 1.0, 1e-12);
}

TEST(Entropy, KnownValues) {
    EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(von_neumann_entropy(Matrix(Matrix::Identity(4, 4) / 4.0)), 2.0, 1e-12);
    const Matrix z = pauli_z();
    EXPECT_TRUE(is_unitary(z));
}

TEST(Entropy, RelativeEntropyProperties) {
    Rng rng(9);
    const auto layout = PartyLayout::qubits({"A", "B"});
    const auto rho = random_density_matrix(layout, 4, rng);
    const auto sigma = random_density_matrix(layout, 4, rng);
    EXPECT_NEAR(relative_entropy(rho, rho), 0.0, 1e-10);
    EXPECT_GT(relative_entropy(rho, sigma), 0.0);
    const auto pure = DensityMatrix(random_pure_state(layout, rng));
    const auto other = DensityMatrix(random_pure_state(layout, rng));
    EXPECT_EQ(relative_entropy(pure, other), kInfinity);
    EXPECT_NEAR(relative_entropy(pure, DensityMatrix(layout, Matrix::Identity(4, 4) / 4.0)), 2.0, 1e-9);
}
