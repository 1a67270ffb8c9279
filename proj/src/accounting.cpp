#include "entacc/accounting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "entacc/entropy.hpp"

namespace entacc {

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

}  // namespace

// Profiles -------------------------------------------------------------------

double EntropyProfile::entropy_of(const std::string& party) const {
    for (std::size_t i = 0; i < parties.size(); ++i)
        if (parties[i] == party) return one_party.at(i);
    throw std::invalid_argument("profile has no party " + party);
}

const PairRee& EntropyProfile::pair(const std::string& a, const std::string& b) const {
    for (const auto& p : pair_ree)
        if ((p.first == a && p.second == b) || (p.first == b && p.second == a)) return p;
    throw std::invalid_argument("profile has no E_r entry for " + a + b);
}

EntropyProfile profile_of(const PureState& state, const OptimizerConfig& config, bool with_ree) {
    const auto& parties = state.layout().parties();
    if (parties.size() != 3 && parties.size() != 4)
        throw std::invalid_argument("profile_of: needs 3 or 4 parties");
    EntropyProfile p;
    p.parties = parties;
    for (const auto& x : parties) p.one_party.push_back(von_neumann_entropy(partial_trace(state, {x})));
    if (parties.size() == 4) {
        for (std::size_t j = 1; j < 4; ++j) {
            CutEntropy cut;
            cut.side = {parties[0], parties[j]};
            for (std::size_t k = 1; k < 4; ++k)
                if (k != j) cut.complement.push_back(parties[k]);
            cut.entropy = von_neumann_entropy(partial_trace(state, cut.side));
            p.bipartitions.push_back(std::move(cut));
        }
    }
    if (with_ree) {
        for (auto [i, j] : pairs_of(parties.size())) {
            const auto r = ree(partial_trace(state, {parties[i], parties[j]}),
                               Partition({{parties[i]}, {parties[j]}}), config);
            p.pair_ree.push_back({parties[i], parties[j], {r.lower, r.upper, r.converged}});
        }
    }
    return p;
}

EntropyProfile one_party_profile(std::vector<std::string> parties, std::vector<double> entropies) {
    if (parties.size() != entropies.size()) throw std::invalid_argument("one_party_profile: size mismatch");
    EntropyProfile p;
    p.parties = std::move(parties);
    p.one_party = std::move(entropies);
    return p;
}

// Rates ----------------------------------------------------------------------

double ExtractionSolution::rate(const std::string& pair) const {
    for (const auto& [name, v] : s)
        if (name == pair || (pair.size() == 2 && name == std::string{pair[1], pair[0]})) return v;
    throw std::invalid_argument("no singlet rate for " + pair);
}

ExtractionSolution solve_ghz_singlet_rates(const EntropyProfile& profile) {
    if (profile.parties.size() != 3) throw std::invalid_argument("solve_ghz_singlet_rates: needs 3 parties");
    const auto& x = profile.parties;
    ExtractionSolution sol;
    double widths = 0.0;
    auto rate = [&](const std::string& a, const std::string& b) {
        const auto& br = profile.pair(a, b).bracket;
        widths += br.width();
        const double mid = std::max(0.0, 0.5 * (br.lower + br.upper));
        sol.s.emplace_back(a + b, mid);
        return mid;
    };
    const double s_ab = rate(x[0], x[1]);
    const double s_bc = rate(x[1], x[2]);
    const double s_ac = rate(x[0], x[2]);
    sol.g_estimates = {profile.one_party[0] - s_ab - s_ac, profile.one_party[1] - s_ab - s_bc,
                       profile.one_party[2] - s_ac - s_bc};
    const auto [lo, hi] = std::minmax_element(sol.g_estimates.begin(), sol.g_estimates.end());
    sol.g = (sol.g_estimates[0] + sol.g_estimates[1] + sol.g_estimates[2]) / 3.0;
    sol.residual = (*hi - *lo) + std::max(0.0, -sol.g);
    sol.tolerance = std::max(1e-6, 3.0 * widths);
    sol.feasible = sol.residual <= sol.tolerance;
    return sol;
}

SingletMatch match_singlets_3party(double s_a, double s_b, double s_c) {
    if (s_a < 0.0 || s_b < 0.0 || s_c < 0.0) throw std::domain_error("match_singlets_3party: negative entropy");
    SingletMatch m;
    m.s_ab = (s_a + s_b - s_c) / 2.0;
    m.s_bc = (s_b + s_c - s_a) / 2.0;
    m.s_ac = (s_a + s_c - s_b) / 2.0;
    m.feasible = m.s_ab >= -1e-9 && m.s_bc >= -1e-9 && m.s_ac >= -1e-9;
    return m;
}

// Linear feasibility ---------------------------------------------------------

LpResult solve_feasibility(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double tol) {
    const std::size_t m = b.size();
    if (a.size() != m) throw std::invalid_argument("solve_feasibility: row count mismatch");
    const std::size_t n = m ? a[0].size() : 0;
    // Tableau columns: x (n), artificials (m), rhs.
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
    std::vector<double> sign(m, 1.0);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != n) throw std::invalid_argument("solve_feasibility: ragged matrix");
        sign[i] = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign[i] * a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = sign[i] * b[i];
        basis[i] = n + i;
    }
    auto reduced_cost = [&](std::size_t j) {
        double c = j >= n && j < n + m ? 1.0 : 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= n) c -= t[i][j];
        return c;
    };
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j)
            if (reduced_cost(j) < -tol) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= tol) continue;
            const double ratio = t[i][cols - 1] / t[i][enter];
            if (leave == m || ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // unbounded direction cannot occur in phase one
        const double pivot = t[leave][enter];
        for (auto& v : t[leave]) v /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0.0) continue;
            const double f = t[i][enter];
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    LpResult r;
    r.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) r.x[basis[i]] = t[i][cols - 1];
        else r.infeasibility += t[i][cols - 1];
    }
    r.feasible = r.infeasibility <= tol;
    if (!r.feasible) {
        // y = c_B B^{-1}; B^{-1} sits in the artificial columns.
        r.y.assign(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            double v = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                if (basis[i] >= n) v += t[i][n + k];
            r.y[k] = sign[k] * v;
        }
    }
    return r;
}

SingletMatchingResult singlet_matching_lp(const EntropyProfile& profile) {
    const auto n = profile.parties.size();
    if (n != 3 && n != 4) throw std::invalid_argument("singlet_matching_lp: supports 3 or 4 parties");
    if (n == 4 && profile.bipartitions.size() != 3)
        throw std::invalid_argument("singlet_matching_lp: four parties need the three 2|2 cut entropies");
    const auto& x = profile.parties;
    const auto pairs = pairs_of(n);
    SingletMatchingResult res;
    for (auto [i, j] : pairs) res.variables.push_back(x[i] + x[j]);

    for (std::size_t i = 0; i < n; ++i) {
        LinearConstraint c{"S_" + x[i], std::vector<double>(pairs.size(), 0.0), profile.one_party.at(i)};
        for (std::size_t v = 0; v < pairs.size(); ++v)
            if (pairs[v].first == i || pairs[v].second == i) c.coefficients[v] = 1.0;
        res.one_party_total += c.rhs;
        res.constraints.push_back(std::move(c));
    }
    for (const auto& cut : profile.bipartitions) {
        std::string name = "S_";
        for (const auto& p : cut.side) name += p;
        LinearConstraint c{name, std::vector<double>(pairs.size(), 0.0), cut.entropy};
        auto on_side = [&](std::size_t party) {
            return std::find(cut.side.begin(), cut.side.end(), x[party]) != cut.side.end();
        };
        for (std::size_t v = 0; v < pairs.size(); ++v)
            if (on_side(pairs[v].first) != on_side(pairs[v].second)) c.coefficients[v] = 1.0;
        res.cut_total += c.rhs;
        res.constraints.push_back(std::move(c));
    }

    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (const auto& c : res.constraints) {
        a.push_back(c.coefficients);
        b.push_back(c.rhs);
    }
    const auto lp = solve_feasibility(a, b);
    res.feasible = lp.feasible;
    if (lp.feasible) {
        res.solution = lp.x;
        for (const auto& c : res.constraints) {
            double lhs = 0.0;
            for (std::size_t v = 0; v < pairs.size(); ++v) lhs += c.coefficients[v] * lp.x[v];
            res.residual = std::max(res.residual, std::abs(lhs - c.rhs));
        }
        return res;
    }

    auto certificate_from = [&](const std::vector<double>& y) {
        FarkasCertificate cert;
        cert.multipliers = y;
        for (std::size_t k = 0; k < y.size(); ++k) cert.combined_rhs += y[k] * b[k];
        cert.max_combined_coefficient = -kInfinity;
        for (std::size_t v = 0; v < pairs.size(); ++v) {
            double col = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k) col += y[k] * a[k][v];
            cert.max_combined_coefficient = std::max(cert.max_combined_coefficient, col);
        }
        return cert;
    };
    auto valid = [](const FarkasCertificate& c) {
        return c.max_combined_coefficient <= 1e-12 && c.combined_rhs > 1e-9;
    };

    if (n == 4) {
        // One-party rows minus cut rows: every pair has coefficient 2 - 2 = 0.
        std::vector<double> y(res.constraints.size(), 1.0);
        for (std::size_t k = n; k < y.size(); ++k) y[k] = -1.0;
        auto cert = certificate_from(y);
        if (valid(cert)) {
            cert.explanation = "one-party rows sum to 2*sum(s) = " + fmt(res.one_party_total) + " (sum(s) = " +
                               fmt(res.one_party_total / 2) + "); 2|2 cut rows sum to 2*sum(s) = " +
                               fmt(res.cut_total) + " (sum(s) = " + fmt(res.cut_total / 2) +
                               "); their difference reads 0 = " + fmt(cert.combined_rhs);
            res.certificate = std::move(cert);
            return res;
        }
    }
    auto y = lp.y;
    double scale = 0.0;
    for (auto v : y) scale = std::max(scale, std::abs(v));
    if (scale > 0.0)
        for (auto& v : y) v /= scale;
    auto cert = certificate_from(y);
    std::ostringstream text;
    for (std::size_t k = 0; k < y.size(); ++k)
        if (std::abs(y[k]) > 1e-12) text << (y[k] < 0 ? " - " : " + ") << fmt(std::abs(y[k])) << "*" << res.constraints[k].name;
    text << ": combined coefficients <= " << fmt(cert.max_combined_coefficient) << " but combined total "
         << fmt(cert.combined_rhs) << " > 0";
    cert.explanation = text.str();
    res.certificate = std::move(cert);
    return res;
}

// GHZ reductions -------------------------------------------------------------

GhzScanReport npartite_ghz_entanglement_scan(int n, int k) {
    if (n < 2 || n > 5) throw std::domain_error("ghz scan: n must lie in [2, 5]");
    if (k < 1 || k >= n) throw std::domain_error("ghz scan: k must lie in [1, n)");
    GhzScanReport report;
    report.n = n;
    report.k = k;
    const auto state = ghz_state(static_cast<std::size_t>(n));
    const auto labels = state.layout().parties();
    const auto d = Eigen::Index{1} << k;
    Matrix classical = Matrix::Zero(d, d);
    classical(0, 0) = classical(d - 1, d - 1) = 0.5;

    report.all_classical = true;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) continue;
        SubsetReduction s;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << (n - 1 - i))) s.parties.push_back(labels[static_cast<std::size_t>(i)]);
        const auto rho = partial_trace(state, s.parties);
        s.deviation = (rho.matrix() - classical).cwiseAbs().maxCoeff();
        s.sigma_upper = relative_entropy(rho.matrix(), classical);
        report.all_classical = report.all_classical && s.deviation <= 1e-12 && s.sigma_upper <= 1e-6;
        report.subsets.push_back(std::move(s));
    }
    report.irreversible_to_k_party = report.all_classical && k >= 2;
    return report;
}

}  // namespace entacc
