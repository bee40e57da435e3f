// oracle.cpp: Truncated Fock baths, exact correlators and exact evolution

#include "fvheat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "fvheat/errors.hpp"
#include "fvheat/superop.hpp"

namespace fvheat::oracle {

namespace {

Eigen::VectorXd mode_populations(double omega, double kerr, double beta, int levels) {
    Eigen::VectorXd p(levels);
    for (int n = 0; n < levels; ++n) {
        const double e = omega * n + kerr * n * (n - 1);
        p(n) = std::exp(-beta * e);
    }
    return p / p.sum();
}

DenseOp identity(Eigen::Index n) { return DenseOp::Identity(n, n); }

}  // namespace

int auto_fock_levels(double omega, double kerr, double beta, double tol) {
    for (int n = 2; n <= 400; ++n) {
        if (mode_populations(omega, kerr, beta, n)(n - 1) < tol) return n;
    }
    throw LeakageError("auto_fock_levels: no truncation below 400 levels meets leakage " +
                       std::to_string(tol));
}

DenseOp BathOperators::heisenberg_y(double t) const {
    const Eigen::Index n = dim();
    DenseOp out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double phase = (energies(i) - energies(j)) * t;
            out(i, j) = y(i, j) * cplx{std::cos(phase), std::sin(phase)};
        }
    }
    return out;
}

TruncatedBath::TruncatedBath(bath::BathSpec spec, double kerr, TruncationPolicy policy)
    : spec_(std::move(spec)), kerr_(kerr) {
    spec_.validate();
    if (kerr_ < 0.0) throw std::invalid_argument("bath.kerr: must be >= 0");
    if (!(policy.leakage_tol > 0.0)) throw std::invalid_argument("oracle.leakage: must be > 0");
    const std::size_t n_modes = spec_.modes.size();
    if (policy.n_fock && policy.n_fock->size() != n_modes)
        throw std::invalid_argument("bath.n_fock: needs one entry per mode");

    for (std::size_t k = 0; k < n_modes; ++k) {
        const auto& m = spec_.modes[k];
        int levels = 0;
        if (policy.n_fock) {
            levels = (*policy.n_fock)[k];
            if (levels < 2) throw std::invalid_argument("bath.n_fock: must be >= 2");
        } else {
            levels = auto_fock_levels(m.omega, kerr_, spec_.beta, policy.leakage_tol);
        }
        const double top = mode_populations(m.omega, kerr_, spec_.beta, levels)(levels - 1);
        leakage_ = std::max(leakage_, top);
        if (!(top < policy.leakage_tol)) {
            throw LeakageError("bath mode " + std::to_string(k) + ": top Fock level population " +
                               std::to_string(top) + " exceeds leakage tolerance " +
                               std::to_string(policy.leakage_tol) + " with n_fock = " +
                               std::to_string(levels));
        }
        n_fock_.push_back(levels);
    }

    Eigen::Index dim = 1;
    for (int n : n_fock_) dim *= n;
    ops_.energies = Eigen::VectorXd::Zero(dim);
    ops_.y = DenseOp::Zero(dim, dim);
    ops_.thermal.populations = Eigen::VectorXd::Ones(1);

    Eigen::Index before = 1;
    for (std::size_t k = 0; k < n_modes; ++k) {
        const int levels = n_fock_[k];
        const Eigen::Index after = dim / (before * levels);
        const auto& m = spec_.modes[k];

        DenseOp lowering = DenseOp::Zero(levels, levels);
        Eigen::VectorXd e(levels);
        for (int n = 0; n < levels; ++n) {
            if (n > 0) lowering(n - 1, n) = std::sqrt(static_cast<double>(n));
            e(n) = m.omega * n + kerr_ * n * (n - 1);
        }
        const DenseOp x = m.ladder_coupling() * (lowering + lowering.adjoint());
        ops_.y += Eigen::kroneckerProduct(identity(before), Eigen::kroneckerProduct(x, identity(after))).eval();
        const Eigen::VectorXd ones_before = Eigen::VectorXd::Ones(before);
        const Eigen::VectorXd ones_after = Eigen::VectorXd::Ones(after);
        ops_.energies += Eigen::kroneckerProduct(ones_before, Eigen::kroneckerProduct(e, ones_after)).eval();
        const Eigen::VectorXd p = mode_populations(m.omega, kerr_, spec_.beta, levels);
        ops_.thermal.populations = Eigen::kroneckerProduct(ops_.thermal.populations, p).eval();
        before *= levels;
    }
    // The cumulant expansion assumes ⟨Y⟩ = 0; parity makes it exact here, so check rather than shift.
    const cplx mean = (ops_.thermal.populations.cast<cplx>().array() * ops_.y.diagonal().array()).sum();
    if (std::abs(mean) > 1e-12 * (1.0 + ops_.y.cwiseAbs().maxCoeff()))
        throw std::logic_error("TruncatedBath: thermal mean of the coupling operator is not zero");
}

bath::KernelSource TruncatedBath::exact_kernel() const {
    // C(τ) = Σ_{n,m} p_n |Y_nm|² e^{i(E_n − E_m)τ}
    struct Line {
        double weight;
        double freq;
    };
    std::vector<Line> lines;
    const Eigen::Index n = ops_.dim();
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const double w = ops_.thermal.populations(a) * std::norm(ops_.y(a, b));
            if (w != 0.0) lines.push_back({w, ops_.energies(a) - ops_.energies(b)});
        }
    }
    auto stationary = [lines = std::move(lines)](double tau) {
        bath::Kappa k;
        for (const auto& l : lines) {
            k.r += l.weight * std::cos(l.freq * tau);
            k.i -= l.weight * std::sin(l.freq * tau);
        }
        return k;
    };
    return bath::KernelSource{stationary, spec_.ramp};
}

cplx sandwich_trace(const BathOperators& ops, const std::vector<double>& left_times,
                    const std::vector<double>& right_times, double nu) {
    DenseOp m = ops.thermal.populations.cast<cplx>().asDiagonal();
    for (auto it = left_times.rbegin(); it != left_times.rend(); ++it) m = ops.heisenberg_y(*it + nu) * m;
    for (double t : right_times) m = m * ops.heisenberg_y(t);
    return m.trace();
}

CorrelationTensor multitime_correlator(const BathOperators& ops, const cumulants::Branches& branches,
                                       const cumulants::Times& times, double nu) {
    if (branches.size() != times.size() || times.empty())
        throw std::invalid_argument("multitime_correlator: need matching, non-empty branches and times");
    std::vector<double> left;
    std::vector<double> right;
    for (std::size_t j = 0; j < times.size(); ++j)
        (branches[j] == Branch::Plus ? left : right).push_back(times[j]);
    std::stable_sort(left.begin(), left.end(), std::greater<>());
    std::stable_sort(right.begin(), right.end());
    return {branches, times, nu, sandwich_trace(ops, left, right, nu)};
}

cumulants::CorrelatorSource correlator_source(const BathOperators& ops, double nu) {
    return [&ops, nu](const cumulants::Branches& b, const cumulants::Times& t) {
        return multitime_correlator(ops, b, t, nu).value;
    };
}

cumulants::CorrelatorSource operator_ordered_source(const BathOperators& ops) {
    return [&ops](const cumulants::Branches&, const cumulants::Times& t) {
        return sandwich_trace(ops, t, {});
    };
}

cumulants::CumulantTensor cumulant(const BathOperators& ops, const cumulants::Branches& branches,
                                   const cumulants::Times& times, double nu) {
    if (times.size() < 1 || times.size() > 4)
        throw std::invalid_argument("cumulant: order must be in 1..4");
    const cplx g = cumulants::cumulant_from_correlators(correlator_source(ops, nu), branches, times);
    return {static_cast<int>(times.size()), branches, times, nu, g};
}

PairSource oracle_pair_source(const BathOperators& ops, double nu) {
    return [&ops, nu](Branch d1, Branch d2, double t1, double t2) {
        return multitime_correlator(ops, {d1, d2}, {t1, t2}, nu).value;
    };
}

cplx wick_reconstruct(const PairSource& pairs, const cumulants::Branches& branches,
                      const cumulants::Times& times) {
    if (branches.size() != times.size())
        throw std::invalid_argument("wick_reconstruct: branches and times differ in length");
    if (times.empty() || times.size() % 2 != 0)
        throw std::invalid_argument("wick_reconstruct: needs an even, non-zero number of times");
    cplx total{0.0, 0.0};
    for (const auto& matching : cumulants::perfect_matchings(static_cast<int>(times.size()))) {
        cplx term{1.0, 0.0};
        for (const auto& pair : matching) {
            const auto j = static_cast<std::size_t>(pair[0]);
            const auto k = static_cast<std::size_t>(pair[1]);
            term *= pairs(branches[j], branches[k], times[j], times[k]);
        }
        total += term;
    }
    return total;
}

cumulants::TraceSource2 trace_source2(const BathOperators& ops) {
    return [&ops](double s, double u) {
        return cumulants::OrderedTraces2{sandwich_trace(ops, {s, u}, {}), sandwich_trace(ops, {s}, {u})};
    };
}

cumulants::TraceSource3 trace_source3(const BathOperators& ops) {
    return [&ops](double s, double u, double v) {
        return cumulants::OrderedTraces3{
            sandwich_trace(ops, {s, u, v}, {}),
            sandwich_trace(ops, {s, u}, {v}),
            sandwich_trace(ops, {s, v}, {u}),
            sandwich_trace(ops, {s}, {v, u}),
        };
    };
}

cumulants::Cumulant4Source cumulant4_source(const BathOperators& ops) {
    return [&ops](double a, double b, double c, double d) {
        const cumulants::Branches labels(4, Branch::Plus);
        return cumulants::cumulant_from_correlators(operator_ordered_source(ops), labels, {a, b, c, d});
    };
}

// ---------------------------------------------------------------- exact evolution

ExactEvolver::ExactEvolver(SystemModel system, std::vector<TruncatedBath> baths, OracleSettings settings)
    : system_(std::move(system)), baths_(std::move(baths)), settings_(settings) {
    for (const auto& b : baths_) bath_dim_ *= b.ops().dim();
    total_dim_ = system_.dim() * bath_dim_;
    if (total_dim_ > settings_.max_dim) {
        throw BudgetExceeded("oracle: total Hilbert-space dimension " + std::to_string(total_dim_) +
                                 " exceeds the cap " + std::to_string(settings_.max_dim),
                             static_cast<double>(total_dim_), static_cast<double>(settings_.max_dim));
    }
    if (settings_.n_steps < 1) throw std::invalid_argument("oracle.n_steps: must be >= 1");

    Eigen::VectorXd e_bath = Eigen::VectorXd::Zero(bath_dim_);
    Eigen::Index before = 1;
    for (const auto& b : baths_) {
        const Eigen::Index d = b.ops().dim();
        const Eigen::Index after = bath_dim_ / (before * d);
        e_bath += Eigen::kroneckerProduct(Eigen::VectorXd::Ones(before),
                                          Eigen::kroneckerProduct(b.ops().energies, Eigen::VectorXd::Ones(after)))
                      .eval();
        const DenseOp y_b = Eigen::kroneckerProduct(identity(before), Eigen::kroneckerProduct(b.ops().y, identity(after)));
        couplings_.push_back(Eigen::kroneckerProduct(system_.x_s, y_b));
        before *= d;
    }
    h_free_ = Eigen::kroneckerProduct(system_.h_s, identity(bath_dim_));
    h_free_.diagonal() += Eigen::kroneckerProduct(Eigen::VectorXd::Ones(system_.dim()), e_bath).eval().cast<cplx>();

    hamiltonian_ = h_free_;
    for (const auto& c : couplings_) hamiltonian_ += c;
    if (!time_dependent()) {
        Eigen::SelfAdjointEigenSolver<DenseOp> eig(hamiltonian_);
        if (eig.info() != Eigen::Success) throw std::runtime_error("oracle: diagonalization failed");
        eigenvalues_ = eig.eigenvalues();
        eigenvectors_ = eig.eigenvectors();
    }
}

bool ExactEvolver::time_dependent() const {
    return std::any_of(baths_.begin(), baths_.end(), [](const TruncatedBath& b) { return b.spec().ramp.has_value(); });
}

DenseOp ExactEvolver::hamiltonian_at(double t) const {
    DenseOp h = h_free_;
    for (std::size_t b = 0; b < baths_.size(); ++b) {
        const auto& ramp = baths_[b].spec().ramp;
        h += (ramp ? (*ramp)(t) : 1.0) * couplings_[b];
    }
    return h;
}

DenseOp ExactEvolver::propagator(double t_i, double t_f) const {
    {
        std::lock_guard lock(cache_->mutex);
        if (cache_->u && cache_->t_i == t_i && cache_->t_f == t_f) return *cache_->u;
    }
    auto u = std::make_shared<const DenseOp>(compute_propagator(t_i, t_f));
    std::lock_guard lock(cache_->mutex);
    cache_->t_i = t_i;
    cache_->t_f = t_f;
    cache_->u = u;
    return *u;
}

DenseOp ExactEvolver::compute_propagator(double t_i, double t_f) const {
    if (time_dependent()) {
        const cplx minus_i{0.0, -1.0};
        return superop::propagate_ordered([&](double t) { return DenseOp(minus_i * hamiltonian_at(t)); },
                                          t_i, t_f, settings_.n_steps);
    }
    const double t = t_f - t_i;
    Eigen::VectorXcd phases(eigenvalues_.size());
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j)
        phases(j) = cplx{std::cos(eigenvalues_(j) * t), -std::sin(eigenvalues_(j) * t)};
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

DenseOp ExactEvolver::initial_state(const DenseOp& rho_s0) const {
    validate_density(rho_s0, system_.dim());
    Eigen::VectorXd p = Eigen::VectorXd::Ones(1);
    for (const auto& b : baths_) p = Eigen::kroneckerProduct(p, b.ops().thermal.populations).eval();
    const DenseOp rho_b = p.cast<cplx>().asDiagonal();
    return Eigen::kroneckerProduct(rho_s0, rho_b);
}

DenseOp ExactEvolver::evolve_full(const DenseOp& rho_full, double t_i, double t_f) const {
    if (t_f == t_i) return rho_full;
    const DenseOp u = propagator(t_i, t_f);
    return u * rho_full * u.adjoint();
}

DenseOp ExactEvolver::partial_trace_bath(const DenseOp& rho_full) const {
    const Eigen::Index ds = system_.dim();
    DenseOp out = DenseOp::Zero(ds, ds);
    for (Eigen::Index a = 0; a < ds; ++a)
        for (Eigen::Index b = 0; b < ds; ++b)
            out(a, b) = rho_full.block(a * bath_dim_, b * bath_dim_, bath_dim_, bath_dim_).trace();
    return out;
}

DenseOp ExactEvolver::reduced_density(const DenseOp& rho_s0, double t_i, double t_f) const {
    if (t_f == t_i) {
        validate_density(rho_s0, system_.dim());
        return rho_s0;
    }
    return partial_trace_bath(evolve_full(initial_state(rho_s0), t_i, t_f));
}

Eigen::VectorXd ExactEvolver::counted_energies(std::size_t counted) const {
    if (counted >= baths_.size()) throw std::invalid_argument("counted_bath: index out of range");
    Eigen::Index before = 1;
    for (std::size_t b = 0; b < counted; ++b) before *= baths_[b].ops().dim();
    const auto& e = baths_[counted].ops().energies;
    const Eigen::Index after = bath_dim_ / (before * e.size());
    const Eigen::VectorXd e_bath =
        Eigen::kroneckerProduct(Eigen::VectorXd::Ones(before), Eigen::kroneckerProduct(e, Eigen::VectorXd::Ones(after)));
    return Eigen::kroneckerProduct(Eigen::VectorXd::Ones(system_.dim()), e_bath);
}

DenseOp ExactEvolver::gamma(const DenseOp& rho_s0, std::size_t counted, double nu, double t_i,
                            double t_f) const {
    const Eigen::VectorXd e = counted_energies(counted);
    const DenseOp u = propagator(t_i, t_f);
    DenseOp shifted = u;
    for (Eigen::Index j = 0; j < u.cols(); ++j)
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double phase = nu * (e(i) - e(j));
            shifted(i, j) *= cplx{std::cos(phase), std::sin(phase)};
        }
    return partial_trace_bath(shifted * initial_state(rho_s0) * u.adjoint());
}

cplx ExactEvolver::generating_function(const DenseOp& rho_s0, std::size_t counted, double nu, double t_i,
                                       double t_f) const {
    return gamma(rho_s0, counted, nu, t_i, t_f).trace();
}

double ExactEvolver::heat_change(const DenseOp& rho_s0, std::size_t counted, double t_i, double t_f) const {
    const Eigen::VectorXd e = counted_energies(counted);
    const DenseOp rho0 = initial_state(rho_s0);
    const DenseOp rho_t = evolve_full(rho0, t_i, t_f);
    double before = 0.0;
    double after = 0.0;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
        before += e(j) * rho0(j, j).real();
        after += e(j) * rho_t(j, j).real();
    }
    return after - before;
}

cplx ExactEvolver::first_moment(const DenseOp& rho_s0, std::size_t counted, double t_i, double t_f,
                                double step) const {
    auto g = [&](double nu) { return generating_function(rho_s0, counted, nu, t_i, t_f); };
    auto central = [&](double h) { return (g(h) - g(-h)) / (2.0 * h); };
    const cplx d = (4.0 * central(0.5 * step) - central(step)) / 3.0;
    return cplx{0.0, -1.0} * d / g(0.0);
}

DenseOp reduced_density(const SystemModel& system, const std::vector<TruncatedBath>& baths,
                        const DenseOp& rho_s0, double t, int n_steps) {
    OracleSettings settings;
    settings.n_steps = n_steps;
    return ExactEvolver(system, baths, settings).reduced_density(rho_s0, 0.0, t);
}

cplx generating_function_exact(const SystemModel& system, const std::vector<TruncatedBath>& baths,
                               std::size_t counted, const DenseOp& rho_s0, double nu, double t) {
    return ExactEvolver(system, baths).generating_function(rho_s0, counted, nu, 0.0, t);
}

}  // namespace fvheat::oracle
