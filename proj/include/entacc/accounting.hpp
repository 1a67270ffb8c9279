#pragma once

// Conservation-law bookkeeping: entropy profiles, forced GHZ/singlet rates
// and singlet-matching feasibility.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entacc/locc.hpp"

namespace entacc {

struct CutEntropy {
    std::vector<std::string> side;
    std::vector<std::string> complement;
    double entropy = 0.0;
};

struct PairRee {
    std::string first;
    std::string second;
    ReeBracket bracket;
};

struct EntropyProfile {
    std::vector<std::string> parties;
    /// Indexed like `parties`.
    std::vector<double> one_party;
    /// 2|2 cuts (four parties only); the side always contains parties[0].
    std::vector<CutEntropy> bipartitions;
    std::vector<PairRee> pair_ree;

    double entropy_of(const std::string& party) const;
    const PairRee& pair(const std::string& a, const std::string& b) const;
};

/// One-party entropies, 2|2 cut entropies (four parties) and pairwise E_r
/// brackets of a 3- or 4-party pure state. Pairwise E_r is skipped when
/// `with_ree` is false.
EntropyProfile profile_of(const PureState& state, const OptimizerConfig& config = {}, bool with_ree = true);

/// Profile with one-party entropies only.
EntropyProfile one_party_profile(std::vector<std::string> parties, std::vector<double> entropies);

struct ExtractionSolution {
    double g = 0.0;
    /// Singlet rates keyed by party pair, in (AB, BC, AC) order for parties
    /// A, B, C of the profile.
    std::vector<std::pair<std::string, double>> s;
    /// The three GHZ estimates from the one-party equations.
    std::vector<double> g_estimates;
    double residual = 0.0;
    double tolerance = 0.0;
    bool feasible = false;

    double rate(const std::string& pair) const;
};

/// s_XY = E_r(rho^XY) bracket midpoint; g from each one-party equation
/// S_X = g + sum of the singlets at X. The residual is the spread of the
/// three estimates plus any negativity; the tolerance is
/// max(1e-6, 3 * sum of bracket widths).
ExtractionSolution solve_ghz_singlet_rates(const EntropyProfile& profile);

struct SingletMatch {
    double s_ab = 0.0;
    double s_bc = 0.0;
    double s_ac = 0.0;
    bool feasible = false;
};

/// Closed-form pair rates from three one-party entropies.
SingletMatch match_singlets_3party(double s_a, double s_b, double s_c);

struct LinearConstraint {
    std::string name;
    std::vector<double> coefficients;
    double rhs = 0.0;
};

struct FarkasCertificate {
    /// One multiplier per constraint; y^T A <= 0 while y^T b > 0.
    std::vector<double> multipliers;
    double combined_rhs = 0.0;
    double max_combined_coefficient = 0.0;
    std::string explanation;
};

struct SingletMatchingResult {
    std::vector<std::string> variables;
    std::vector<LinearConstraint> constraints;
    bool feasible = false;
    std::vector<double> solution;
    double residual = 0.0;
    std::optional<FarkasCertificate> certificate;
    /// Totals implied by summing the one-party rows and the cut rows: each
    /// pair appears twice in both sums.
    double one_party_total = 0.0;
    double cut_total = 0.0;
};

/// Feasibility of s_ij >= 0 with sum_j s_ij = S_i and, for four parties,
/// crossing sums equal to the 2|2 cut entropies.
SingletMatchingResult singlet_matching_lp(const EntropyProfile& profile);

struct LpResult {
    bool feasible = false;
    std::vector<double> x;
    /// Farkas multipliers when infeasible.
    std::vector<double> y;
    double infeasibility = 0.0;
};

/// Phase-one simplex for A x = b, x >= 0 (dense, Bland's rule).
LpResult solve_feasibility(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                           double tol = 1e-9);

struct SubsetReduction {
    std::vector<std::string> parties;
    /// Largest entry deviation from (|0..0><0..0| + |1..1><1..1|) / 2.
    double deviation = 0.0;
    /// Relative entropy to that explicit two-atom product mixture.
    double sigma_upper = 0.0;
};

struct GhzScanReport {
    int n = 0;
    int k = 0;
    std::vector<SubsetReduction> subsets;
    bool all_classical = false;
    /// No k-party entanglement in any reduction: ghz(n) cannot be converted
    /// reversibly into k-party entangled states.
    bool irreversible_to_k_party = false;
};

GhzScanReport npartite_ghz_entanglement_scan(int n, int k);

}  // namespace entacc
