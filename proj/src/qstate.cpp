#include "entacc/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "subsystems.hpp"

namespace entacc {

namespace {

std::vector<std::size_t> global_targets(const PartyLayout& layout, const std::string& party,
                                        const std::vector<std::size_t>& local) {
    const auto all = layout.subsystems_of(party);
    if (local.empty()) return all;
    std::vector<std::size_t> out;
    for (auto i : local) {
        if (i >= all.size())
            throw std::invalid_argument("subsystem " + std::to_string(i) + " out of range for party " + party);
        if (std::find(out.begin(), out.end(), all[i]) != out.end())
            throw std::invalid_argument("repeated subsystem index for party " + party);
        out.push_back(all[i]);
    }
    return out;
}

std::size_t dim_over(const PartyLayout& layout, const std::vector<std::size_t>& targets) {
    const auto dims = layout.subsystem_dims();
    std::size_t d = 1;
    for (auto t : targets) d *= dims[t];
    return d;
}

std::vector<std::size_t> kept_subsystems(const PartyLayout& layout, const std::vector<std::string>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::set<std::string> wanted;
    for (const auto& label : keep) {
        if (!layout.has_party(label)) throw std::invalid_argument("partial_trace: unknown party " + label);
        if (!wanted.insert(label).second) throw std::invalid_argument("partial_trace: repeated party " + label);
    }
    std::vector<std::size_t> out;
    for (const auto& label : layout.parties())
        if (wanted.count(label))
            for (auto s : layout.subsystems_of(label)) out.push_back(s);
    return out;
}

Matrix lift(const PartyLayout& layout, const std::vector<std::size_t>& targets, const Matrix& op) {
    // Full-space operator; only used for small validation paths.
    const auto dims = layout.subsystem_dims();
    Matrix full = Matrix::Identity(static_cast<Eigen::Index>(layout.total_dim()),
                                   static_cast<Eigen::Index>(layout.total_dim()));
    detail::apply_on_subsystems_columns(full, dims, targets, op);
    return full;
}

}  // namespace

// PartyLayout ----------------------------------------------------------------

PartyLayout::PartyLayout(std::vector<std::string> parties, std::vector<std::vector<std::size_t>> dims,
                         std::size_t max_dim)
    : parties_(std::move(parties)), dims_(std::move(dims)), max_dim_(max_dim) {
    if (parties_.empty()) throw std::invalid_argument("layout needs at least one party");
    if (parties_.size() != dims_.size()) throw std::invalid_argument("layout: parties and dims differ in length");
    std::set<std::string> seen;
    for (const auto& p : parties_) {
        if (p.empty()) throw std::invalid_argument("layout: empty party label");
        if (!seen.insert(p).second) throw std::invalid_argument("layout: duplicate party label " + p);
    }
    total_dim_ = 1;
    for (const auto& local : dims_) {
        if (local.empty()) throw std::invalid_argument("layout: party without subsystems");
        for (auto d : local) {
            if (d < 2) throw std::invalid_argument("layout: local dimension must be >= 2");
            if (total_dim_ > max_dim_ / d)
                throw CapacityError("joint dimension exceeds cap " + std::to_string(max_dim_));
            total_dim_ *= d;
        }
    }
}

PartyLayout PartyLayout::qubits(const std::vector<std::string>& parties, std::size_t max_dim) {
    return PartyLayout(parties, std::vector<std::vector<std::size_t>>(parties.size(), {2}), max_dim);
}

bool PartyLayout::has_party(const std::string& label) const {
    return std::find(parties_.begin(), parties_.end(), label) != parties_.end();
}

std::size_t PartyLayout::party_index(const std::string& label) const {
    auto it = std::find(parties_.begin(), parties_.end(), label);
    if (it == parties_.end()) throw std::invalid_argument("unknown party " + label);
    return static_cast<std::size_t>(it - parties_.begin());
}

std::size_t PartyLayout::local_dim(const std::string& label) const {
    return detail::product_of(dims_[party_index(label)]);
}

std::vector<std::size_t> PartyLayout::subsystem_dims() const {
    std::vector<std::size_t> out;
    for (const auto& local : dims_) out.insert(out.end(), local.begin(), local.end());
    return out;
}

std::vector<std::size_t> PartyLayout::subsystems_of(const std::string& label) const {
    const auto idx = party_index(label);
    std::size_t start = 0;
    for (std::size_t i = 0; i < idx; ++i) start += dims_[i].size();
    std::vector<std::size_t> out(dims_[idx].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = start + i;
    return out;
}

PartyLayout PartyLayout::restricted(const std::vector<std::string>& keep) const {
    std::vector<std::string> parties;
    std::vector<std::vector<std::size_t>> dims;
    for (std::size_t i = 0; i < parties_.size(); ++i) {
        if (std::find(keep.begin(), keep.end(), parties_[i]) != keep.end()) {
            parties.push_back(parties_[i]);
            dims.push_back(dims_[i]);
        }
    }
    return PartyLayout(std::move(parties), std::move(dims), max_dim_);
}

PartyLayout PartyLayout::with_ancilla(const std::string& label, std::size_t dim) const {
    auto dims = dims_;
    dims[party_index(label)].push_back(dim);
    return PartyLayout(parties_, std::move(dims), max_dim_);
}

PartyLayout PartyLayout::with_max_dim(std::size_t max_dim) const {
    return PartyLayout(parties_, dims_, max_dim);
}

// States ---------------------------------------------------------------------

PureState::PureState(PartyLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim())
        throw std::invalid_argument("pure state: amplitude count does not match layout dimension");
    if (std::abs(amplitudes_.norm() - 1.0) > kStateTol)
        throw std::invalid_argument("pure state: norm differs from 1");
}

DensityMatrix::DensityMatrix(PartyLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(layout_.total_dim());
    if (matrix_.rows() != d || matrix_.cols() != d)
        throw std::invalid_argument("density matrix: shape does not match layout dimension");
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
        throw std::invalid_argument("density matrix: not Hermitian");
    if (std::abs(matrix_.trace() - cplx(1.0)) > kStateTol)
        throw std::invalid_argument("density matrix: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(matrix_), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kStateTol)
        throw std::invalid_argument("density matrix: negative eigenvalue");
}

DensityMatrix::DensityMatrix(const PureState& psi) : layout_(psi.layout()), matrix_(psi.projector()) {}

template <class State>
Ensemble<State>::Ensemble(std::vector<EnsembleMember<State>> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("ensemble: no members");
    double total = 0.0;
    for (const auto& m : members_) {
        if (m.probability < 0.0) throw std::invalid_argument("ensemble: negative probability");
        if (!(m.state.layout() == members_.front().state.layout()))
            throw std::invalid_argument("ensemble: members have different layouts");
        total += m.probability;
    }
    if (std::abs(total - 1.0) > kStateTol) throw std::invalid_argument("ensemble: probabilities do not sum to 1");
}

template class Ensemble<PureState>;
template class Ensemble<DensityMatrix>;

ProjectiveMeasurement::ProjectiveMeasurement(std::string party, std::vector<Matrix> projectors,
                                             std::vector<std::string> labels,
                                             std::vector<std::size_t> subsystems)
    : party_(std::move(party)),
      projectors_(std::move(projectors)),
      labels_(std::move(labels)),
      subsystems_(std::move(subsystems)) {
    if (projectors_.empty()) throw std::invalid_argument("measurement: no projectors");
    const auto d = projectors_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < projectors_.size(); ++k) {
        const auto& p = projectors_[k];
        if (p.rows() != d || p.cols() != d) throw std::invalid_argument("measurement: projector shapes differ");
        if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
            throw std::invalid_argument("measurement: projector not Hermitian");
        if ((p * p - p).cwiseAbs().maxCoeff() > kStateTol)
            throw std::invalid_argument("measurement: projector not idempotent");
        for (std::size_t j = 0; j < k; ++j)
            if ((p * projectors_[j]).cwiseAbs().maxCoeff() > kStateTol)
                throw std::invalid_argument("measurement: projectors not orthogonal");
        sum += p;
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kStateTol)
        throw std::invalid_argument("measurement: projectors do not sum to identity");
    if (labels_.empty())
        for (std::size_t k = 0; k < projectors_.size(); ++k) labels_.push_back(std::to_string(k));
    if (labels_.size() != projectors_.size()) throw std::invalid_argument("measurement: label count mismatch");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw std::invalid_argument("measurement: duplicate outcome labels");
}

// Construction ---------------------------------------------------------------

std::vector<std::string> default_party_labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < 26)
            out.emplace_back(1, static_cast<char>('A' + i));
        else
            out.push_back("P" + std::to_string(i));
    }
    return out;
}

PureState product_zero(const PartyLayout& layout) {
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    amps[0] = 1.0;
    return PureState(layout, std::move(amps));
}

PureState tensor_product(const PureState& a, const PureState& b) {
    const auto& la = a.layout();
    const auto& lb = b.layout();
    std::vector<std::string> parties = la.parties();
    std::vector<std::vector<std::size_t>> dims = la.dims();
    for (std::size_t i = 0; i < lb.party_count(); ++i) {
        const auto& label = lb.parties()[i];
        if (la.has_party(label)) {
            auto& local = dims[la.party_index(label)];
            local.insert(local.end(), lb.dims()[i].begin(), lb.dims()[i].end());
        } else {
            parties.push_back(label);
            dims.push_back(lb.dims()[i]);
        }
    }
    PartyLayout layout(parties, dims, std::min(la.max_dim(), lb.max_dim()));

    // kron(a, b) has subsystems ordered as (a's..., b's...); reorder to canonical.
    auto combined = la.subsystem_dims();
    const auto b_dims = lb.subsystem_dims();
    const auto a_count = combined.size();
    combined.insert(combined.end(), b_dims.begin(), b_dims.end());
    std::vector<std::size_t> order;
    for (const auto& label : parties) {
        if (la.has_party(label))
            for (auto s : la.subsystems_of(label)) order.push_back(s);
        if (lb.has_party(label))
            for (auto s : lb.subsystems_of(label)) order.push_back(a_count + s);
    }
    const Vector kron = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
    const auto perm = detail::index_permutation(combined, order);
    Vector amps(kron.size());
    for (std::size_t n = 0; n < perm.size(); ++n) amps[static_cast<Eigen::Index>(n)] = kron[static_cast<Eigen::Index>(perm[n])];
    return PureState(std::move(layout), std::move(amps));
}

PureState ghz_state(std::size_t n) { return make_named_state("ghz", std::vector<double>{double(n)}); }
PureState phi1_state(double alpha) { return make_named_state("phi1", std::vector<double>{alpha}); }
PureState phi2_state(double alpha) { return make_named_state("phi2", std::vector<double>{alpha}); }

PureState make_named_state(const std::string& name, std::span<const double> params,
                           const std::vector<std::string>& labels) {
    auto layout_for = [&](std::size_t n) {
        if (!labels.empty() && labels.size() != n)
            throw std::invalid_argument(name + ": expected " + std::to_string(n) + " party labels");
        return PartyLayout::qubits(labels.empty() ? default_party_labels(n) : labels);
    };
    auto count_param = [&](std::size_t fallback) -> std::size_t {
        if (params.empty()) return fallback;
        const double v = params[0];
        if (v < 1 || std::floor(v) != v) throw std::invalid_argument(name + ": party count must be a positive integer");
        return static_cast<std::size_t>(v);
    };
    auto alpha_param = [&]() {
        if (params.empty()) throw std::invalid_argument(name + ": missing alpha");
        const double a = params[0];
        if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error(name + ": alpha must lie in [0, 1]");
        return std::pair{a, std::sqrt(std::max(0.0, 1.0 - a * a))};
    };
    const double r = 1.0 / std::sqrt(2.0);

    if (name == "ghz") {
        const auto n = count_param(3);
        if (n < 2) throw std::invalid_argument("ghz: needs at least 2 parties");
        auto layout = layout_for(n);
        Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
        amps[0] = r;
        amps[amps.size() - 1] = r;
        return PureState(std::move(layout), std::move(amps));
    }
    if (name == "singlet" || name == "psi_plus" || name == "psi_minus") {
        auto layout = layout_for(2);
        Vector amps = Vector::Zero(4);
        amps[0] = r;
        amps[3] = name == "psi_minus" ? -r : r;
        return PureState(std::move(layout), std::move(amps));
    }
    if (name == "phi1") {
        const auto [a, b] = alpha_param();
        auto layout = layout_for(3);
        Vector amps = Vector::Zero(8);
        amps[0] = a;
        amps[7] = b;
        return PureState(std::move(layout), std::move(amps));
    }
    if (name == "phi2") {
        // alpha |0> Psi+ + beta |1> Psi-
        const auto [a, b] = alpha_param();
        auto layout = layout_for(3);
        Vector amps = Vector::Zero(8);
        amps[0] = a * r;
        amps[3] = a * r;
        amps[4] = b * r;
        amps[7] = -b * r;
        return PureState(std::move(layout), std::move(amps));
    }
    if (name == "product_zero" || name == "product") {
        return product_zero(layout_for(count_param(labels.empty() ? 3 : labels.size())));
    }
    throw std::invalid_argument("unknown state name: " + name);
}

// Reductions -----------------------------------------------------------------

DensityMatrix partial_trace(const PureState& state, const std::vector<std::string>& keep) {
    const auto& layout = state.layout();
    const auto dims = layout.subsystem_dims();
    const auto kept = kept_subsystems(layout, keep);
    const auto off_k = detail::offsets_over(dims, kept);
    const auto off_r = detail::offsets_over(dims, detail::complement_of(dims.size(), kept));
    Matrix m(static_cast<Eigen::Index>(off_k.size()), static_cast<Eigen::Index>(off_r.size()));
    for (std::size_t i = 0; i < off_k.size(); ++i)
        for (std::size_t j = 0; j < off_r.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                state.amplitudes()[static_cast<Eigen::Index>(off_k[i] + off_r[j])];
    return DensityMatrix(layout.restricted(keep), hermitian_part(m * m.adjoint()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    const auto& layout = rho.layout();
    const auto dims = layout.subsystem_dims();
    const auto kept = kept_subsystems(layout, keep);
    const auto off_k = detail::offsets_over(dims, kept);
    const auto off_r = detail::offsets_over(dims, detail::complement_of(dims.size(), kept));
    const auto n = static_cast<Eigen::Index>(off_k.size());
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (auto r : off_r)
                acc += rho.matrix()(static_cast<Eigen::Index>(off_k[i] + r), static_cast<Eigen::Index>(off_k[j] + r));
            out(i, j) = acc;
        }
    return DensityMatrix(layout.restricted(keep), hermitian_part(out));
}

// Local operations -----------------------------------------------------------

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

PureState apply_local_unitary(const PureState& state, const std::string& party, const Matrix& u,
                              const std::vector<std::size_t>& subsystems) {
    const auto targets = global_targets(state.layout(), party, subsystems);
    if (static_cast<std::size_t>(u.rows()) != dim_over(state.layout(), targets) || u.rows() != u.cols())
        throw std::invalid_argument("apply_local_unitary: dimension mismatch");
    if (!is_unitary(u)) throw std::invalid_argument("apply_local_unitary: matrix is not unitary");
    Vector amps = state.amplitudes();
    detail::apply_on_subsystems(amps, state.layout().subsystem_dims(), targets, u);
    amps.normalize();
    return PureState(state.layout(), std::move(amps));
}

DensityMatrix apply_local_unitary(const DensityMatrix& rho, const std::string& party, const Matrix& u,
                                  const std::vector<std::size_t>& subsystems) {
    const auto targets = global_targets(rho.layout(), party, subsystems);
    if (static_cast<std::size_t>(u.rows()) != dim_over(rho.layout(), targets) || u.rows() != u.cols())
        throw std::invalid_argument("apply_local_unitary: dimension mismatch");
    if (!is_unitary(u)) throw std::invalid_argument("apply_local_unitary: matrix is not unitary");
    const auto dims = rho.layout().subsystem_dims();
    Matrix m = rho.matrix();
    detail::apply_on_subsystems_columns(m, dims, targets, u);
    Matrix mt = m.adjoint();
    detail::apply_on_subsystems_columns(mt, dims, targets, u);
    return DensityMatrix(rho.layout(), hermitian_part(mt.adjoint()));
}

std::vector<MeasurementOutcome> measure_outcomes(const PureState& state, const ProjectiveMeasurement& m) {
    const auto targets = global_targets(state.layout(), m.party(), m.subsystems());
    if (static_cast<std::size_t>(m.projectors().front().rows()) != dim_over(state.layout(), targets))
        throw std::invalid_argument("measure: projector dimension does not match the party's space");
    const auto dims = state.layout().subsystem_dims();
    std::vector<std::size_t> index;
    std::vector<std::pair<double, Vector>> kept;
    double total = 0.0;
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        Vector v = state.amplitudes();
        detail::apply_on_subsystems(v, dims, targets, m.projectors()[k]);
        const double prob = v.squaredNorm();
        if (prob < kBranchCutoff) continue;
        total += prob;
        index.push_back(k);
        kept.emplace_back(prob, std::move(v));
    }
    std::vector<MeasurementOutcome> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        auto& [prob, v] = kept[i];
        v /= std::sqrt(prob);
        out.push_back({m.labels()[index[i]], prob / total, PureState(state.layout(), std::move(v))});
    }
    return out;
}

PureEnsemble measure(const PureState& state, const ProjectiveMeasurement& m) {
    std::vector<EnsembleMember<PureState>> members;
    for (auto& o : measure_outcomes(state, m)) members.push_back({o.probability, std::move(o.state)});
    return PureEnsemble(std::move(members));
}

MixedEnsemble measure(const DensityMatrix& rho, const ProjectiveMeasurement& m) {
    const auto targets = global_targets(rho.layout(), m.party(), m.subsystems());
    if (static_cast<std::size_t>(m.projectors().front().rows()) != dim_over(rho.layout(), targets))
        throw std::invalid_argument("measure: projector dimension does not match the party's space");
    std::vector<std::pair<double, Matrix>> kept;
    double total = 0.0;
    for (const auto& p : m.projectors()) {
        const Matrix full = lift(rho.layout(), targets, p);
        Matrix post = full * rho.matrix() * full;
        const double prob = post.trace().real();
        if (prob < kBranchCutoff) continue;
        total += prob;
        kept.emplace_back(prob, std::move(post));
    }
    std::vector<EnsembleMember<DensityMatrix>> members;
    for (auto& [prob, post] : kept)
        members.push_back({prob / total, DensityMatrix(rho.layout(), hermitian_part(post / prob))});
    return MixedEnsemble(std::move(members));
}

PureState attach_ancilla(const PureState& state, const std::string& party, std::size_t dim) {
    if (dim < 2) throw std::invalid_argument("attach_ancilla: dimension must be >= 2");
    auto layout = state.layout().with_ancilla(party, dim);
    const auto old_dims = state.layout().subsystem_dims();
    const auto position = state.layout().subsystems_of(party).back() + 1;
    std::size_t low = 1;
    for (std::size_t i = position; i < old_dims.size(); ++i) low *= old_dims[i];
    const auto& old = state.amplitudes();
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    for (Eigen::Index j = 0; j < old.size(); ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const auto high = uj / low;
        const auto rem = uj % low;
        amps[static_cast<Eigen::Index>(high * dim * low + rem)] = old[j];
    }
    return PureState(std::move(layout), std::move(amps));
}

MixedEnsemble reduce(const PureEnsemble& ensemble, const std::vector<std::string>& keep) {
    std::vector<EnsembleMember<DensityMatrix>> out;
    for (const auto& m : ensemble.members()) out.push_back({m.probability, partial_trace(m.state, keep)});
    return MixedEnsemble(std::move(out));
}

MixedEnsemble reduce(const MixedEnsemble& ensemble, const std::vector<std::string>& keep) {
    std::vector<EnsembleMember<DensityMatrix>> out;
    for (const auto& m : ensemble.members()) out.push_back({m.probability, partial_trace(m.state, keep)});
    return MixedEnsemble(std::move(out));
}

Matrix average(const MixedEnsemble& ensemble) {
    const auto d = static_cast<Eigen::Index>(ensemble.layout().total_dim());
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& m : ensemble.members()) acc += m.probability * m.state.matrix();
    return acc;
}

double fidelity(const PureState& a, const PureState& b) {
    if (!(a.layout() == b.layout())) throw std::invalid_argument("fidelity: layouts differ");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace entacc
