// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "entacc/accounting.hpp"
#include "entacc/protocols.hpp"
#include "entacc/random.hpp"

using namespace entacc;

namespace {

struct Result {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OptimizerConfig fuzz_config() {
    OptimizerConfig c;
    c.gap_tol = 1e-4;
    c.max_iters = 400;
    return c;
}

double exact_yield(int n) {
    double y = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double c = std::round(std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)));
        y += c * std::ldexp(1.0, -n) * std::log2(c);
    }
    return y;
}

bool contains(const ReeBracket& b, double value, double tol) {
    return b.lower <= value + tol && b.upper >= value - tol;
}

void criterion1(Result& out) {
    const Partition split = Partition::parse("A|B,C");
    RunOptions o;
    o.splits = {split};
    const auto r = run(ghz3_to_bc_singlet(), o);
    const auto singlet = make_named_state("singlet", {}, {"B", "C"});
    double min_f = 1.0;
    for (const auto& leaf : r.leaves) {
        const auto bc = partial_trace(leaf.state, {"B", "C"}).matrix();
        min_f = std::min(min_f, (singlet.amplitudes().adjoint() * bc * singlet.amplitudes())(0, 0).real());
    }
    const auto a = r.ledger.group_index({"A"});
    const auto t = r.ledger.target_index(Partition::parse("B|C"));
    const auto& first = r.ledger.rows.front();
    const auto& last = r.ledger.rows.back();
    const auto audit = audit_protocol(r.ledger, split);
    out.require(r.leaves.size() == 2, "two leaves");
    out.require(min_f >= 1.0 - 1e-9, "singlet fidelity");
    out.require(first.entropy[a] == 1.0 && std::abs(last.entropy[a]) <= 1e-12, "S_A 1 -> 0");
    out.require(first.ree[t].lower >= -1e-12 && first.ree[t].upper <= 1e-3, "initial E_r in [0, 1e-3]");
    out.require(contains(last.ree[t], 1.0, 1e-3), "final E_r contains 1");
    out.require(audit.overall.verdict == Verdict::pass && audit.overall.saturated, "inequality saturated");
    out.require(audit.violations == 0, "no violations");
    out.detail << "fidelity_min=" << min_f << " S_A " << first.entropy[a] << "->" << last.entropy[a] << " E_r(B|C) ["
               << first.ree[t].lower << "," << first.ree[t].upper << "]->[" << last.ree[t].lower << ","
               << last.ree[t].upper << "] lhs=" << audit.overall.lhs << " rhs=" << audit.overall.rhs;
}

void criterion2(Result& out) {
    Rng rng(2024);
    const auto layout = PartyLayout::qubits({"A", "B"});
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_int_distribution<int> members(3, 5);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<EnsembleMember<DensityMatrix>> m;
        double total = 0.0;
        const int k = members(rng);
        for (int i = 0; i < k; ++i) {
            const double w = unit(rng);
            total += w;
            m.push_back({w, random_density_matrix(layout, 1 + i % 4, rng)});
        }
        for (auto& x : m) x.probability /= total;
        const auto sigma = random_density_matrix(layout, 4, rng);
        worst = std::max(worst, donald_identity_residual(MixedEnsemble(m), sigma));
    }
    out.require(worst <= 1e-9, "residual <= 1e-9");
    out.detail << "ensembles=100 max_residual=" << worst;
}

struct FuzzTally {
    int protocols = 0;
    int checks = 0;
    int indeterminate = 0;
    int violations = 0;
    int entropy_failures = 0;
};

void audit_into(FuzzTally& tally, const LedgerReport& ledger, const Partition& split) {
    const auto a = audit_protocol(ledger, split);
    tally.checks += a.ree_checks;
    tally.indeterminate += a.indeterminate;
    tally.violations += a.violations;
    for (const auto& row : a.rows)
        if (!row.entropy_ok) ++tally.entropy_failures;
}

void criterion3(Result& out) {
    FuzzTally tally;
    const std::vector<Partition> splits{Partition::parse("A|B,C"), Partition::parse("B|A,C"),
                                        Partition::parse("C|A,B")};
    for (int s = 0; s < 50; ++s) {
        std::vector<std::vector<std::size_t>> dims{{2}, {2}, {2}};
        if (s % 3 == 0) dims[(s / 3) % 3] = {2, 2};
        const PartyLayout layout({"A", "B", "C"}, dims);
        const auto p = random_protocol(layout, 1 + s % 3, static_cast<std::uint64_t>(s));
        RunOptions o;
        o.splits = splits;
        o.ree_config = fuzz_config();
        const auto r = run(p, o);
        for (const auto& split : splits) audit_into(tally, r.ledger, split);
        ++tally.protocols;
    }
    const double rate = tally.checks ? static_cast<double>(tally.indeterminate) / tally.checks : 0.0;
    out.require(tally.violations == 0 && tally.entropy_failures == 0, "zero certified violations");
    out.require(rate <= 0.10, "indeterminate rate <= 10%");
    out.detail << "protocols=" << tally.protocols << " ree_checks=" << tally.checks
               << " violations=" << tally.violations << " entropy_failures=" << tally.entropy_failures
               << " indeterminate=" << tally.indeterminate << " (" << 100.0 * rate << "%)";
}

void criterion4(Result& out) {
    const auto singlet = ree(DensityMatrix(make_named_state("singlet")), Partition::parse("A|B"));
    out.require(std::abs(singlet.upper - 1.0) <= 1e-3 && singlet.lower <= 1.0 + 1e-3, "singlet");
    const auto ghz_bc = ree(partial_trace(ghz_state(3), {"B", "C"}), Partition::parse("B|C"));
    out.require(ghz_bc.upper <= 1e-3, "ghz3 BC");
    out.detail << "singlet=" << singlet.upper << " ghz3_BC=" << ghz_bc.upper;
    for (double l : {0.6, 0.75, 0.9}) {
        const auto r = ree(partial_trace(phi2_state(std::sqrt(l)), {"B", "C"}), Partition::parse("B|C"));
        const double expect = 1.0 - binary_entropy(l);
        out.require(std::abs(r.upper - expect) <= 5e-3, "bell diagonal " + std::to_string(l));
        out.detail << " bell(" << l << ")=" << r.upper << "/" << expect;
    }
    Rng rng(77);
    double worst = 0.0;
    for (auto dims : {std::vector<std::vector<std::size_t>>{{2}, {2}}, {{2}, {3}}}) {
        for (int t = 0; t < 5; ++t) {
            const auto psi = random_pure_state(PartyLayout({"A", "B"}, dims), rng);
            const auto r = ree(DensityMatrix(psi), Partition::parse("A|B"));
            worst = std::max(worst, std::abs(r.upper - von_neumann_entropy(partial_trace(psi, {"A"}))));
        }
    }
    out.require(worst <= 5e-3, "pure bipartite");
    out.detail << " pure_max_err=" << worst;
}

void criterion5(Result& out) {
    const auto m = singlet_matching_lp(profile_of(ghz_state(4), {}, false));
    out.require(!m.feasible && m.certificate.has_value(), "ghz4 infeasible with certificate");
    if (m.certificate) {
        out.require(std::abs(m.one_party_total / 2.0 - 2.0) <= 1e-12, "one-party rows give sum s = 2");
        out.require(std::abs(m.cut_total - 3.0) <= 1e-12, "cut rows total 3");
        out.require(m.certificate->combined_rhs > 0.0 && m.certificate->max_combined_coefficient <= 1e-12,
                    "Farkas certificate");
        out.detail << "ghz4: " << m.certificate->explanation;
    }
    const auto g3 = singlet_matching_lp(one_party_profile({"A", "B", "C"}, {1.0, 1.0, 1.0}));
    out.require(g3.feasible && g3.solution == std::vector<double>{0.5, 0.5, 0.5}, "ghz3 one-party (1/2,1/2,1/2)");
    out.detail << "; ghz3 s=(";
    for (std::size_t i = 0; i < g3.solution.size(); ++i) out.detail << (i ? "," : "") << g3.solution[i];
    out.detail << ")";
}

void criterion6(Result& out) {
    for (double a2 : {0.1, 0.3, 0.5}) {
        const auto s = solve_ghz_singlet_rates(profile_of(phi1_state(std::sqrt(a2))));
        bool zero = true;
        for (const auto& [pair, v] : s.s) zero = zero && std::abs(v) <= 1e-6;
        out.require(std::abs(s.g - binary_entropy(a2)) <= 1e-6 && zero, "phi1 " + std::to_string(a2));
        out.detail << "phi1(" << a2 << ") g=" << s.g << " ";
    }
    const double h = binary_entropy(0.75);
    const auto s = solve_ghz_singlet_rates(profile_of(phi2_state(std::sqrt(0.75))));
    out.require(s.feasible, "phi2 feasible");
    out.require(std::abs(s.g - h) <= 5e-3, "phi2 g");
    out.require(std::abs(s.rate("BC") - (1.0 - h)) <= 5e-3, "phi2 s_BC");
    out.require(std::abs(s.rate("AB")) <= 5e-3 && std::abs(s.rate("AC")) <= 5e-3, "phi2 s_AB, s_AC");
    out.detail << "phi2(0.75) g=" << s.g << "/" << h << " s_BC=" << s.rate("BC") << "/" << 1.0 - h
               << " s_AB=" << s.rate("AB") << " s_AC=" << s.rate("AC");
}

void criterion7(Result& out) {
    double worst = 0.0, prev_rate = 0.0, dense_worst = 0.0;
    bool monotone = true;
    for (int n = 1; n <= 8; ++n) {
        const double y = expected_yield(concentrate_phi1(std::sqrt(0.5), n));
        worst = std::max(worst, std::abs(y - exact_yield(n)));
        if (y / n < prev_rate - 1e-12) monotone = false;
        prev_rate = y / n;
        if (n <= 4) dense_worst = std::max(dense_worst, std::abs(concentrate_phi1_dense(std::sqrt(0.5), n).expected_yield - y));
    }
    out.require(worst <= 1e-9, "exact sums");
    out.require(monotone, "yield/n non-decreasing");
    out.require(dense_worst <= 1e-9, "dense cross-check");
    out.detail << "max_err=" << worst << " n6_yield=" << expected_yield(concentrate_phi1(std::sqrt(0.5), 6))
               << " dense_max_err=" << dense_worst;
}

void criterion8(Result& out) {
    const Partition split = Partition::parse("A|B,C");
    RunOptions o;
    o.splits = {split};
    const auto r = run(concat(two_singlets_to_ghz(), ghz3_to_bc_singlet({0}, {0}), "round_trip"), o);
    const double before = r.ledger.rows.front().ledger_ebits;
    const double after = r.ledger.rows.back().ledger_ebits;
    const auto audit = audit_protocol(r.ledger, split);
    out.require(before - after >= 1.0 - 1e-6, "loses >= 1 ebit");
    out.require(audit.reversibility.verdict == "irreversible", "no conservation certified");
    out.require(audit.violations == 0, "audit passes");
    out.detail << "ledger_ebits " << before << "->" << after << " reversibility=" << audit.reversibility.verdict
               << " dS_A=" << audit.reversibility.entropy_change << " drift=" << audit.reversibility.ree_drift;
}

void criterion9(Result& out) {
    FuzzTally tally;
    const std::vector<std::string> parties{"A", "B", "C", "D"};
    const std::vector<Partition> splits{Partition::parse("A|B|C,D"), Partition::parse("D|A,B|C")};
    for (int s = 0; s < 20; ++s) {
        const auto p = random_protocol(PartyLayout::qubits(parties), 1 + s % 2, 1000 + static_cast<std::uint64_t>(s));
        RunOptions o;
        o.splits = splits;
        o.ree_config = fuzz_config();
        const auto r = run(p, o);
        for (const auto& split : splits) audit_into(tally, r.ledger, split);
    }
    out.require(tally.violations == 0 && tally.entropy_failures == 0, "zero certified violations");
    Rng rng(909);
    int refinement_failures = 0;
    double worst_margin = kInfinity;
    const auto fine = Partition::finest(parties);
    const auto coarse = Partition::parse("A|B|C,D");
    for (int t = 0; t < 20; ++t) {
        const auto rho = random_density_matrix(PartyLayout::qubits(parties), 2, rng);
        const auto f = ree(rho, fine, fuzz_config());
        const auto c = ree(rho, coarse, fuzz_config());
        const double margin = f.upper - c.lower + f.gap() + c.gap() + 1e-6;
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0.0) ++refinement_failures;
    }
    out.require(refinement_failures == 0, "refinement monotonicity");
    out.detail << "protocols=20 ree_checks=" << tally.checks << " violations=" << tally.violations
               << " indeterminate=" << tally.indeterminate << " refinement_failures=" << refinement_failures
               << " min_margin=" << worst_margin;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        double budget_s;
        std::function<void(Result&)> body;
    };
    const std::vector<Criterion> criteria{
        {1, 10, criterion1},   {2, 30, criterion2},  {3, 1800, criterion3},
        {4, 300, criterion4},  {5, 1, criterion5},   {6, 300, criterion6},
        {7, 60, criterion7},   {8, 600, criterion8}, {9, 1800, criterion9},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        Result out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(out);
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        const double t = seconds_since(t0);
        out.require(t <= c.budget_s, "runtime budget " + std::to_string(static_cast<int>(c.budget_s)) + " s");
        std::printf("criterion %d: %s  %s  (%.2f s)\n", c.id, out.ok ? "PASS" : "FAIL", out.detail.str().c_str(), t);
        std::fflush(stdout);
        if (!out.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
