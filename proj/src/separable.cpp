#include "entacc/separable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "entacc/random.hpp"
#include "subsystems.hpp"

namespace entacc {

namespace {

// Canonical <-> block-ordered index maps for one partition of a layout.
struct Geometry {
    std::vector<std::size_t> block_dims;
    std::vector<std::size_t> perm;  // block-ordered index -> canonical index
    std::size_t dim = 1;
};

Geometry geometry_of(const PartyLayout& layout, const Partition& partition) {
    partition.check_covers(layout);
    const auto sub_dims = layout.subsystem_dims();
    Geometry g;
    std::vector<std::size_t> order;
    for (const auto& block : partition.blocks()) {
        std::size_t bd = 1;
        for (const auto& label : layout.parties()) {
            if (std::find(block.begin(), block.end(), label) == block.end()) continue;
            for (auto s : layout.subsystems_of(label)) {
                order.push_back(s);
                bd *= sub_dims[s];
            }
        }
        g.block_dims.push_back(bd);
    }
    g.perm = detail::index_permutation(sub_dims, order);
    g.dim = layout.total_dim();
    return g;
}

Vector kron_all(const std::vector<Vector>& factors, std::size_t from, std::size_t to) {
    Vector acc = Vector::Ones(1);
    for (std::size_t i = from; i < to; ++i) acc = Eigen::kroneckerProduct(acc, factors[i]).eval();
    return acc;
}

Vector to_canonical(const Geometry& g, const Vector& block_ordered) {
    Vector out(block_ordered.size());
    for (std::size_t n = 0; n < g.perm.size(); ++n)
        out[static_cast<Eigen::Index>(g.perm[n])] = block_ordered[static_cast<Eigen::Index>(n)];
    return out;
}

Vector to_block_order(const Geometry& g, const Vector& canonical) {
    Vector out(canonical.size());
    for (std::size_t n = 0; n < g.perm.size(); ++n)
        out[static_cast<Eigen::Index>(n)] = canonical[static_cast<Eigen::Index>(g.perm[n])];
    return out;
}

Vector atom_vector(const Geometry& g, const std::vector<Vector>& factors) {
    return to_canonical(g, kron_all(factors, 0, factors.size()));
}

double expectation(const Matrix& op, const Vector& v) { return v.dot(op * v).real(); }

// Best factor for block b with the others fixed: minimal eigenvector of the
// gradient contracted against the other factors.
double update_block(const Matrix& gradient, const Geometry& g, std::vector<Vector>& factors, std::size_t b) {
    const auto db = static_cast<Eigen::Index>(g.block_dims[b]);
    const Vector left = kron_all(factors, 0, b);
    const Vector right = kron_all(factors, b + 1, factors.size());
    const Matrix block_ordered = Eigen::kroneckerProduct(
        Eigen::kroneckerProduct(left, Matrix::Identity(db, db)).eval(), right);
    Matrix x(block_ordered.rows(), db);
    for (std::size_t n = 0; n < g.perm.size(); ++n)
        x.row(static_cast<Eigen::Index>(g.perm[n])) = block_ordered.row(static_cast<Eigen::Index>(n));
    const Matrix h = hermitian_part(x.adjoint() * gradient * x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    factors[b] = es.eigenvectors().col(0);
    return es.eigenvalues()[0];
}

double sweep_to_convergence(const Matrix& gradient, const Geometry& g, std::vector<Vector>& factors,
                            int max_sweeps) {
    double value = expectation(gradient, atom_vector(g, factors));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double current = value;
        for (std::size_t b = 0; b < factors.size(); ++b) current = update_block(gradient, g, factors, b);
        const bool settled = value - current < 1e-10;
        value = current;
        if (settled) break;
    }
    return value;
}

// Dominant local factors of a joint vector, block by block.
std::vector<Vector> local_factors_of(const Geometry& g, const Vector& canonical) {
    const Vector x = to_block_order(g, canonical);
    std::vector<Vector> out;
    std::size_t left = 1;
    for (std::size_t b = 0; b < g.block_dims.size(); ++b) {
        const auto db = g.block_dims[b];
        const auto right = g.dim / (left * db);
        Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
        for (std::size_t l = 0; l < left; ++l)
            for (std::size_t r = 0; r < right; ++r) {
                Vector slice(static_cast<Eigen::Index>(db));
                for (std::size_t i = 0; i < db; ++i) slice[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>((l * db + i) * right + r)];
                rho += slice * slice.adjoint();
            }
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho));
        out.push_back(es.eigenvectors().col(static_cast<Eigen::Index>(db) - 1));
        left *= db;
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Evaluation {
    double value = 0.0;
    Matrix gradient;
};

// f(sigma) = S(rho||sigma) and its gradient in sigma, in bits. sigma must be
// full rank.
class Objective {
public:
    explicit Objective(const Matrix& rho) : rho_(hermitian_part(rho)), entropy_(von_neumann_entropy(rho_)) {}

    Evaluation operator()(const Matrix& sigma) const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(sigma));
        const RealVector& lambda = es.eigenvalues();
        const Matrix& v = es.eigenvectors();
        const Matrix rotated = v.adjoint() * rho_ * v;
        const auto d = lambda.size();
        Evaluation out;
        double cross = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) cross -= rotated(i, i).real() * std::log2(lambda[i]);
        out.value = cross - entropy_;
        Matrix weighted(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                const double li = lambda[i];
                const double lj = lambda[j];
                const double diff = li - lj;
                const double divided = std::abs(diff) > 1e-10 * std::max(li, lj)
                                           ? (std::log(li) - std::log(lj)) / diff
                                           : 2.0 / (li + lj);
                weighted(i, j) = rotated(i, j) * divided;
            }
        out.gradient = hermitian_part(v * weighted * v.adjoint()) * (-1.0 / std::numbers::ln2);
        return out;
    }

private:
    Matrix rho_;
    double entropy_;
};

double trace_product(const Matrix& a, const Matrix& hermitian_b) {
    return (a.array() * hermitian_b.array().conjugate()).sum().real();
}

}  // namespace

// Partition ------------------------------------------------------------------

Partition::Partition(std::vector<std::vector<std::string>> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.size() < 2) throw std::invalid_argument("partition needs at least two blocks");
    std::set<std::string> seen;
    for (const auto& block : blocks_) {
        if (block.empty()) throw std::invalid_argument("partition: empty block");
        for (const auto& label : block)
            if (!seen.insert(label).second) throw std::invalid_argument("partition: party " + label + " repeated");
    }
}

Partition Partition::parse(const std::string& text) {
    std::vector<std::vector<std::string>> blocks;
    std::stringstream outer(text);
    std::string block_text;
    while (std::getline(outer, block_text, '|')) {
        std::vector<std::string> block;
        std::stringstream inner(block_text);
        std::string label;
        while (std::getline(inner, label, ',')) {
            label.erase(0, label.find_first_not_of(" \t"));
            label.erase(label.find_last_not_of(" \t") + 1);
            if (!label.empty()) block.push_back(label);
        }
        blocks.push_back(std::move(block));
    }
    return Partition(std::move(blocks));
}

Partition Partition::finest(const std::vector<std::string>& parties) {
    std::vector<std::vector<std::string>> blocks;
    for (const auto& p : parties) blocks.push_back({p});
    return Partition(std::move(blocks));
}

std::vector<std::string> Partition::parties() const {
    std::vector<std::string> out;
    for (const auto& block : blocks_) out.insert(out.end(), block.begin(), block.end());
    return out;
}

std::string Partition::to_string() const {
    std::string out;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (b) out += '|';
        for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
            if (i) out += ',';
            out += blocks_[b][i];
        }
    }
    return out;
}

void Partition::check_covers(const PartyLayout& layout) const {
    const auto mine = parties();
    if (mine.size() != layout.party_count())
        throw std::invalid_argument("partition " + to_string() + " does not cover the state's parties");
    for (const auto& label : mine)
        if (!layout.has_party(label))
            throw std::invalid_argument("partition " + to_string() + " names unknown party " + label);
}

// Models ---------------------------------------------------------------------

Vector product_vector(const PartyLayout& layout, const Partition& partition, const ProductAtom& atom) {
    const auto g = geometry_of(layout, partition);
    if (atom.factors.size() != g.block_dims.size()) throw std::invalid_argument("product atom: wrong factor count");
    for (std::size_t b = 0; b < g.block_dims.size(); ++b) {
        if (static_cast<std::size_t>(atom.factors[b].size()) != g.block_dims[b])
            throw std::invalid_argument("product atom: factor dimension mismatch");
        if (std::abs(atom.factors[b].norm() - 1.0) > kStateTol)
            throw std::invalid_argument("product atom: factor not normalized");
    }
    return atom_vector(g, atom.factors);
}

SeparableModel::SeparableModel(PartyLayout layout, std::vector<Partition> partitions,
                               std::vector<ProductAtom> atoms, std::vector<double> weights)
    : layout_(std::move(layout)),
      partitions_(std::move(partitions)),
      atoms_(std::move(atoms)),
      weights_(std::move(weights)) {
    if (atoms_.size() != weights_.size()) throw std::invalid_argument("separable model: atom/weight count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (weights_[i] < 0.0) throw std::invalid_argument("separable model: negative weight");
        if (atoms_[i].partition_index >= partitions_.size())
            throw std::invalid_argument("separable model: atom refers to a missing partition");
        total += weights_[i];
    }
    if (std::abs(total - 1.0) > kStateTol) throw std::invalid_argument("separable model: weights do not sum to 1");
}

DensityMatrix SeparableModel::assemble() const {
    const auto d = static_cast<Eigen::Index>(layout_.total_dim());
    std::vector<Geometry> geoms;
    for (const auto& p : partitions_) geoms.push_back(geometry_of(layout_, p));
    Matrix acc = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Vector v = atom_vector(geoms[atoms_[i].partition_index], atoms_[i].factors);
        acc.noalias() += weights_[i] * (v * v.adjoint());
    }
    return DensityMatrix(layout_, hermitian_part(acc));
}

void OptimizerConfig::validate() const {
    if (!(gap_tol > 0.0)) throw std::invalid_argument("optimizer: gap_tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("optimizer: max_iters must be >= 1");
    if (restarts < 0) throw std::invalid_argument("optimizer: restarts must be >= 0");
    if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw std::invalid_argument("optimizer: epsilon must lie in (0, 1e-3]");
    if (max_atoms < 2) throw std::invalid_argument("optimizer: max_atoms must be >= 2");
}

// Linear minimization oracle -------------------------------------------------

LmoResult lmo_product_atom(const Matrix& gradient, const PartyLayout& layout, const Partition& partition,
                           int restarts, std::uint64_t seed, const std::vector<ProductAtom>& warm_starts) {
    const auto g = geometry_of(layout, partition);
    if (static_cast<std::size_t>(gradient.rows()) != g.dim || gradient.rows() != gradient.cols())
        throw std::invalid_argument("lmo: gradient dimension does not match the layout");
    const Matrix h = hermitian_part(gradient);

    std::vector<std::vector<Vector>> starts;
    {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        starts.push_back(local_factors_of(g, es.eigenvectors().col(0)));
    }
    for (const auto& w : warm_starts)
        if (w.factors.size() == g.block_dims.size()) starts.push_back(w.factors);
    Rng rng(seed);
    for (int r = 0; r < restarts; ++r) {
        std::vector<Vector> factors;
        for (auto db : g.block_dims) factors.push_back(random_unit_vector(db, rng));
        starts.push_back(std::move(factors));
    }

    // Short sweeps from every start, then the two best are run to convergence.
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < starts.size(); ++i)
        ranked.emplace_back(sweep_to_convergence(h, g, starts[i], 8), i);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    LmoResult best;
    best.value = kInfinity;
    for (std::size_t r = 0; r < std::min<std::size_t>(2, ranked.size()); ++r) {
        auto& factors = starts[ranked[r].second];
        const double value = sweep_to_convergence(h, g, factors, 200);
        if (value < best.value - 1e-15) {
            best.value = value;
            best.atom.factors = factors;
        }
    }
    best.starts = static_cast<int>(starts.size());
    for (auto& f : best.atom.factors) f.normalize();
    return best;
}

// Frank-Wolfe ----------------------------------------------------------------

REEResult ree(const DensityMatrix& rho, const Partition& partition, const OptimizerConfig& config) {
    return ree(rho, std::vector<Partition>{partition}, config);
}

REEResult ree(const DensityMatrix& rho, const std::vector<Partition>& partitions, const OptimizerConfig& config) {
    config.validate();
    std::vector<Partition> gens;
    for (const auto& p : partitions)
        if (std::find(gens.begin(), gens.end(), p) == gens.end()) gens.push_back(p);
    for (const auto& p : config.partitions)
        if (std::find(gens.begin(), gens.end(), p) == gens.end()) gens.push_back(p);
    if (gens.empty()) throw std::invalid_argument("ree: no partition given");

    const auto& layout = rho.layout();
    std::vector<Geometry> geoms;
    for (const auto& p : gens) geoms.push_back(geometry_of(layout, p));

    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    const double dd = static_cast<double>(d);
    // The uniform admixture has to stay above the support cutoff.
    const double eps = std::max(config.epsilon, 10.0 * dd * kEigenCutoff);
    const Matrix mixed = Matrix::Identity(d, d) / dd;
    const double correction = eps * std::log2(dd);
    const Objective objective(rho.matrix());

    int lmo_calls = 0;
    int starts_used = 0;
    ProductAtom last_atom;
    auto oracle = [&](const Matrix& gradient) {
        LmoResult best;
        best.value = kInfinity;
        for (std::size_t k = 0; k < gens.size(); ++k) {
            std::vector<ProductAtom> warm;
            if (last_atom.partition_index == k && !last_atom.factors.empty()) warm.push_back(last_atom);
            auto r = lmo_product_atom(gradient, layout, gens[k], config.restarts,
                                      mix_seed(config.seed, static_cast<std::uint64_t>(lmo_calls) * 64 + k), warm);
            starts_used += r.starts;
            r.atom.partition_index = k;
            if (r.value < best.value - 1e-15) best = std::move(r);
        }
        ++lmo_calls;
        last_atom = best.atom;
        return best;
    };

    std::vector<ProductAtom> atoms;
    std::vector<Vector> vecs;
    std::vector<double> weights;

    {
        const auto first = oracle(objective(mixed).gradient);
        atoms.push_back(first.atom);
        vecs.push_back(atom_vector(geoms[0 + first.atom.partition_index], first.atom.factors));
        weights.push_back(1.0);
    }
    Matrix tau = vecs[0] * vecs[0].adjoint();
    auto sigma_of = [&](const Matrix& t) -> Matrix { return (1.0 - eps) * t + eps * mixed; };
    auto rebuild_tau = [&]() {
        tau.setZero(d, d);
        for (std::size_t i = 0; i < vecs.size(); ++i) tau.noalias() += weights[i] * (vecs[i] * vecs[i].adjoint());
    };

    // Exact line search along sigma + (1 - eps) * gamma * direction for gamma
    // in [0, gamma_max]; returns gamma = 0 when the direction does not descend.
    auto line_search = [&](const Matrix& direction, double gamma_max, const Evaluation& at_zero,
                           Evaluation& next) -> double {
        const Matrix base = sigma_of(tau);
        auto slope = [&](double gamma, Evaluation& at) {
            at = objective(base + (1.0 - eps) * gamma * direction);
            return (1.0 - eps) * trace_product(at.gradient, direction);
        };
        const double slope0 = (1.0 - eps) * trace_product(at_zero.gradient, direction);
        if (!(slope0 < 0.0) || !(gamma_max > 0.0)) return 0.0;
        double hi = gamma_max;
        double s_hi = slope(hi, next);
        if (s_hi <= 0.0) return hi;
        // Illinois iteration on the slope over [lo, hi].
        double lo = 0.0;
        double s_lo = slope0;
        double gamma = hi;
        int side = 0;
        for (int k = 0; k < 60; ++k) {
            double mid = (lo * s_hi - hi * s_lo) / (s_hi - s_lo);
            if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
            const double s_mid = slope(mid, next);
            gamma = mid;
            if (std::abs(s_mid) <= 1e-2 * std::abs(slope0) || hi - lo < 1e-14 * std::max(1.0, gamma_max)) break;
            if (s_mid > 0.0) {
                hi = mid;
                s_hi = s_mid;
                if (side == -1) s_lo *= 0.5;
                side = -1;
            } else {
                lo = mid;
                s_lo = s_mid;
                if (side == 1) s_hi *= 0.5;
                side = 1;
            }
        }
        return gamma;
    };
    auto drop_atom = [&](std::size_t i) {
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(i));
        vecs.erase(vecs.begin() + static_cast<std::ptrdiff_t>(i));
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(i));
    };
    auto renormalize = [&]() {
        double total = 0.0;
        for (auto w : weights) total += w;
        for (auto& w : weights) w /= total;
        rebuild_tau();
    };

    REEResult result;
    double best_lower = 0.0;
    Evaluation current = objective(sigma_of(tau));
    result.upper_trace.push_back(current.value);
    auto accept = [&](Evaluation&& next) {
        current = std::move(next);
        result.upper_trace.push_back(current.value);
    };

    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        const auto fw = oracle(current.gradient);
        std::vector<double> active_values(vecs.size());
        double g_tau = 0.0;
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            active_values[i] = expectation(current.gradient, vecs[i]);
            g_tau += weights[i] * active_values[i];
        }
        const double fw_gap = (1.0 - eps) * (g_tau - fw.value);
        best_lower = std::max(best_lower, current.value - std::max(fw_gap, 0.0) - correction);
        if (current.value - best_lower <= config.gap_tol) {
            result.converged = true;
            break;
        }

        const auto away = static_cast<std::size_t>(
            std::max_element(active_values.begin(), active_values.end()) - active_values.begin());
        const double away_gap = (1.0 - eps) * (active_values[away] - g_tau);

        const Vector s_vec = atom_vector(geoms[fw.atom.partition_index], fw.atom.factors);
        std::size_t s_index = vecs.size();
        for (std::size_t i = 0; i < vecs.size(); ++i)
            if (std::norm(vecs[i].dot(s_vec)) > 1.0 - 1e-12) {
                s_index = i;
                break;
            }
        const bool full = s_index == vecs.size() && vecs.size() >= config.max_atoms;
        const bool use_away = vecs.size() > 1 && (away_gap > fw_gap || full);
        if (!use_away && full) break;

        Evaluation next;
        bool moved = false;
        if (use_away) {
            const double gamma_max = weights[away] / (1.0 - weights[away]);
            const double gamma =
                line_search(tau - vecs[away] * vecs[away].adjoint(), gamma_max, current, next);
            if (gamma > 0.0 && next.value <= current.value) {
                for (auto& w : weights) w *= 1.0 + gamma;
                weights[away] -= gamma;
                if (gamma >= gamma_max || weights[away] <= 0.0) drop_atom(away);
                moved = true;
            }
        } else {
            const double gamma = line_search(s_vec * s_vec.adjoint() - tau, 1.0, current, next);
            if (gamma > 0.0 && next.value <= current.value) {
                if (gamma >= 1.0) {
                    atoms = {fw.atom};
                    vecs = {s_vec};
                    weights = {1.0};
                } else {
                    for (auto& w : weights) w *= 1.0 - gamma;
                    if (s_index == vecs.size()) {
                        atoms.push_back(fw.atom);
                        vecs.push_back(s_vec);
                        weights.push_back(gamma);
                    } else {
                        weights[s_index] += gamma;
                    }
                }
                moved = true;
            }
        }
        if (!moved) break;
        renormalize();
        accept(objective(sigma_of(tau)));

        // Corrective pairwise steps over the active set (no oracle calls)
        // until the active-set gap falls well below the global one.
        constexpr int inner_cap = 50;
        for (int inner = 0; inner < inner_cap && vecs.size() > 1; ++inner) {
            std::size_t lo_i = 0;
            std::size_t hi_i = 0;
            std::vector<double> values(vecs.size());
            for (std::size_t i = 0; i < vecs.size(); ++i) {
                values[i] = expectation(current.gradient, vecs[i]);
                if (values[i] < values[lo_i]) lo_i = i;
                if (values[i] > values[hi_i]) hi_i = i;
            }
            const double local_gap = (1.0 - eps) * (values[hi_i] - values[lo_i]);
            if (lo_i == hi_i || local_gap <= 0.25 * std::max(fw_gap, 0.0) || local_gap < 1e-14) break;
            const Matrix direction = vecs[lo_i] * vecs[lo_i].adjoint() - vecs[hi_i] * vecs[hi_i].adjoint();
            Evaluation step;
            const double gamma = line_search(direction, weights[hi_i], current, step);
            if (!(gamma > 0.0) || !(step.value <= current.value)) break;
            weights[lo_i] += gamma;
            weights[hi_i] -= gamma;
            if (weights[hi_i] <= 1e-15) drop_atom(hi_i);
            renormalize();
            accept(objective(sigma_of(tau)));
        }
    }
    if (iter == config.max_iters) {
        // Final gap estimate at the last iterate.
        const auto fw = oracle(current.gradient);
        double g_tau = 0.0;
        for (std::size_t i = 0; i < vecs.size(); ++i) g_tau += weights[i] * expectation(current.gradient, vecs[i]);
        best_lower = std::max(best_lower, current.value - std::max((1.0 - eps) * (g_tau - fw.value), 0.0) - correction);
    }

    // Explicit certificate: FW atoms plus the uniform admixture written as
    // computational product basis states of the first partition.
    std::vector<ProductAtom> model_atoms = atoms;
    std::vector<double> model_weights;
    for (auto w : weights) model_weights.push_back((1.0 - eps) * w);
    const auto& g0 = geoms[0];
    std::vector<std::size_t> inverse(g0.perm.size());
    for (std::size_t n = 0; n < g0.perm.size(); ++n) inverse[g0.perm[n]] = n;
    for (std::size_t c = 0; c < static_cast<std::size_t>(d); ++c) {
        ProductAtom basis;
        std::size_t n = inverse[c];
        std::vector<Vector> factors(g0.block_dims.size());
        for (std::size_t b = g0.block_dims.size(); b-- > 0;) {
            const auto db = g0.block_dims[b];
            factors[b] = Vector::Zero(static_cast<Eigen::Index>(db));
            factors[b][static_cast<Eigen::Index>(n % db)] = 1.0;
            n /= db;
        }
        basis.factors = std::move(factors);
        model_atoms.push_back(std::move(basis));
        model_weights.push_back(eps / dd);
    }
    result.model = SeparableModel(layout, gens, std::move(model_atoms), std::move(model_weights));
    result.upper = relative_entropy(rho.matrix(), result.model.assemble().matrix());
    result.lower = std::clamp(best_lower, 0.0, result.upper);
    result.iterations = iter;
    result.restarts_used = starts_used;
    result.converged = result.upper - result.lower <= config.gap_tol;
    return result;
}

// Donald's identity ----------------------------------------------------------

double donald_identity_residual(const MixedEnsemble& ensemble, const DensityMatrix& sigma) {
    const Matrix avg = hermitian_part(average(ensemble));
    if (avg.rows() != sigma.matrix().rows()) throw std::invalid_argument("donald: dimension mismatch");
    auto finite = [](double v, const char* what) {
        if (!std::isfinite(v)) throw SupportError(std::string("donald: infinite ") + what);
        return v;
    };
    const double lhs = -finite(relative_entropy(avg, sigma.matrix()), "S(rho||sigma)");
    double rhs = 0.0;
    for (const auto& m : ensemble.members()) {
        const double to_avg = finite(relative_entropy(m.state.matrix(), avg), "S(rho_k||rho)");
        const double to_sigma = finite(relative_entropy(m.state.matrix(), sigma.matrix()), "S(rho_k||sigma)");
        rhs += m.probability * (to_avg - to_sigma);
    }
    return std::abs(lhs - rhs);
}

// Monotonicity probe ---------------------------------------------------------

MixedEnsemble apply_channel(const DensityMatrix& rho, const LocalChannel& channel, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EnsembleMember<DensityMatrix>> members{{1.0, rho}};
    for (const auto& op : channel.ops) {
        std::vector<EnsembleMember<DensityMatrix>> next;
        for (auto& m : members) {
            const auto& layout = m.state.layout();
            std::size_t local = 1;
            {
                const auto dims = layout.subsystem_dims();
                const auto subs = layout.subsystems_of(op.party);
                if (op.subsystems.empty())
                    for (auto s : subs) local *= dims[s];
                else
                    for (auto i : op.subsystems) local *= dims.at(subs.at(i));
            }
            switch (op.kind) {
                case LocalOp::Kind::unitary:
                    next.push_back({m.probability, apply_local_unitary(m.state, op.party, op.unitary, op.subsystems)});
                    break;
                case LocalOp::Kind::random_unitary:
                    next.push_back({m.probability, apply_local_unitary(m.state, op.party, random_unitary(local, rng),
                                                                       op.subsystems)});
                    break;
                case LocalOp::Kind::measurement:
                case LocalOp::Kind::random_measurement: {
                    const auto pm = op.kind == LocalOp::Kind::measurement
                                        ? *op.measurement
                                        : random_projective_measurement(op.party, local, op.outcomes, rng, op.subsystems);
                    const auto outcomes = measure(m.state, pm);
                    for (const auto& child : outcomes.members())
                        next.push_back({m.probability * child.probability, child.state});
                    break;
                }
            }
        }
        members = std::move(next);
    }
    return MixedEnsemble(std::move(members));
}

MonotonicityReport er_monotonicity_probe(const DensityMatrix& rho, const Partition& partition,
                                         const LocalChannel& channel, int trials, std::uint64_t seed,
                                         const OptimizerConfig& config) {
    if (trials < 1) throw std::invalid_argument("probe: trials must be >= 1");
    MonotonicityReport report;
    const auto initial = ree(rho, partition, config);
    for (int t = 0; t < trials; ++t) {
        const auto ensemble = apply_channel(rho, channel, mix_seed(seed, static_cast<std::uint64_t>(t)));
        MonotonicityTrial trial;
        trial.initial_upper = initial.upper;
        trial.initial_lower = initial.lower;
        double gaps = initial.gap();
        for (const auto& m : ensemble.members()) {
            const auto r = ree(m.state, partition, config);
            trial.probabilities.push_back(m.probability);
            trial.final_upper.push_back(r.upper);
            trial.final_lower.push_back(r.lower);
            trial.average_final_upper += m.probability * r.upper;
            gaps += r.gap();
        }
        trial.slack = gaps + 1e-6;
        trial.slack_consumed = std::max(0.0, trial.average_final_upper - initial.upper);
        trial.violation = trial.average_final_upper > initial.upper + trial.slack;
        if (trial.violation) ++report.violations;
        report.trials.push_back(std::move(trial));
    }
    return report;
}

}  // namespace entacc
