// influence.cpp: Cell quadrature of the kernels, pair weights and the path-pair sum

#include "fvheat/influence.hpp"

#include <gsl/gsl_integration.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "fvheat/errors.hpp"
#include "fvheat/format.hpp"

namespace fvheat::influence {

namespace {

constexpr cplx kI{0.0, 1.0};

struct GaussRule {
    std::vector<double> x;  // nodes on [0, 1]
    std::vector<double> w;
};

GaussRule gauss_rule(int order) {
    if (order < 1) throw std::invalid_argument("gauss_order: must be >= 1");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), &gsl_integration_glfixed_table_free);
    if (!table) throw std::runtime_error("gauss_rule: table allocation failed");
    GaussRule rule;
    for (int i = 0; i < order; ++i) {
        double xi = 0.0;
        double wi = 0.0;
        gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &xi, &wi, table.get());
        rule.x.push_back(xi);
        rule.w.push_back(wi);
    }
    return rule;
}

void check_pair(const PathPair& pair, int n, Eigen::Index dim) {
    if (static_cast<int>(pair.q.size()) != n || static_cast<int>(pair.q_tilde.size()) != n)
        throw std::invalid_argument("path pair: length differs from n_slices");
    for (int k = 0; k < n; ++k) {
        const auto k_ = static_cast<std::size_t>(k);
        if (pair.q[k_] < 0 || pair.q[k_] >= dim || pair.q_tilde[k_] < 0 || pair.q_tilde[k_] >= dim)
            throw std::invalid_argument("path pair: index outside the eigenbasis");
    }
}

cplx path_exponent(const InfluenceCoefficients& c, const CTable& cross, const PathPair& pair,
                   const Eigen::VectorXd& ev) {
    const int n = c.grid.n_slices;
    check_pair(pair, n, ev.size());
    cplx total{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const double x = ev(pair.q[static_cast<std::size_t>(k)]);
        const double y = ev(pair.q_tilde[static_cast<std::size_t>(k)]);
        for (int kp = 0; kp <= k; ++kp) {
            const double xp = ev(pair.q[static_cast<std::size_t>(kp)]);
            const double yp = ev(pair.q_tilde[static_cast<std::size_t>(kp)]);
            total += pair_term(c, cross, k, kp, x, xp, y, yp);
        }
    }
    return total;
}

double zeta(Branch b, double zp, double zm) { return b == Branch::Plus ? zp : zm; }

DenseOp evolution(const DenseOp& h, double t) {
    Eigen::SelfAdjointEigenSolver<DenseOp> eig(h);
    Eigen::VectorXcd phases(eig.eigenvalues().size());
    for (Eigen::Index j = 0; j < phases.size(); ++j)
        phases(j) = cplx{std::cos(eig.eigenvalues()(j) * t), -std::sin(eig.eigenvalues()(j) * t)};
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::vector<std::string> expect_row(std::istream& is, std::size_t fields, const char* who) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(std::string(who) + ": unexpected end of input");
    auto row = split_csv(line);
    if (row.size() != fields)
        throw std::runtime_error(std::string(who) + ": expected " + std::to_string(fields) + " fields, got " +
                                 std::to_string(row.size()));
    return row;
}

int parse_int(const std::string& s) {
    const double v = parse_double(s);
    if (v != std::floor(v)) throw std::invalid_argument("parse_int: not an integer: '" + s + "'");
    return static_cast<int>(v);
}

}  // namespace

// ---------------------------------------------------------------- grid

PathGrid PathGrid::make(double t_i, double t_f, int n_slices) {
    PathGrid g{t_i, t_f, n_slices};
    g.validate();
    return g;
}

void PathGrid::validate() const {
    if (n_slices < 1) throw std::invalid_argument("grid.n_slices: must be >= 1");
    if (!(t_f > t_i)) throw std::invalid_argument("grid.t_f: must exceed t_i");
}

// ---------------------------------------------------------------- coefficients

CTable InfluenceCoefficients::unshifted_cross() const {
    const int n = grid.n_slices;
    CTable x = CTable::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        x(k, k) = 2.0 * eta_r(k, k);
        for (int kp = 0; kp < k; ++kp) {
            x(k, kp) = cplx{eta_r(k, kp), eta_i(k, kp)};
            x(kp, k) = cplx{eta_r(k, kp), -eta_i(k, kp)};
        }
    }
    return x;
}

InfluenceCoefficients discretize_action(const bath::KernelSource& kernel, const PathGrid& grid, double nu,
                                        int gauss_order) {
    grid.validate();
    const GaussRule rule = gauss_rule(gauss_order);
    const int n = grid.n_slices;
    const double dt = grid.dt();
    const auto g = static_cast<std::size_t>(gauss_order);

    InfluenceCoefficients c;
    c.grid = grid;
    c.nu = nu;
    c.gauss_order = gauss_order;
    c.eta_r = Table::Zero(n, n);
    c.eta_i = Table::Zero(n, n);
    c.cross = CTable::Zero(n, n);

    for (int k = 0; k < n; ++k) {
        const double a = grid.slice_start(k);
        // triangle s > s′ inside the slice: s = a + dt·x, s′ = a + dt·x·y
        double tr = 0.0;
        double ti = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = 0; j < g; ++j) {
                const double s = a + dt * rule.x[i];
                const double sp = a + dt * rule.x[i] * rule.x[j];
                const double w = rule.w[i] * rule.w[j] * rule.x[i];
                const bath::Kappa kap = kernel.at(s, sp);
                tr += w * kap.r;
                ti += w * kap.i;
            }
        }
        c.eta_r(k, k) = dt * dt * tr;
        c.eta_i(k, k) = dt * dt * ti;

        for (int kp = 0; kp < k; ++kp) {
            const double b = grid.slice_start(kp);
            double sr = 0.0;
            double si = 0.0;
            for (std::size_t i = 0; i < g; ++i) {
                for (std::size_t j = 0; j < g; ++j) {
                    const bath::Kappa kap = kernel.at(a + dt * rule.x[i], b + dt * rule.x[j]);
                    sr += rule.w[i] * rule.w[j] * kap.r;
                    si += rule.w[i] * rule.w[j] * kap.i;
                }
            }
            c.eta_r(k, kp) = dt * dt * sr;
            c.eta_i(k, kp) = dt * dt * si;
        }
    }

    if (nu == 0.0) {
        c.cross = c.unshifted_cross();
        return c;
    }
    for (int k = 0; k < n; ++k) {
        for (int kp = 0; kp < n; ++kp) {
            const double a = grid.slice_start(k);
            const double b = grid.slice_start(kp);
            cplx sum{0.0, 0.0};
            for (std::size_t i = 0; i < g; ++i) {
                for (std::size_t j = 0; j < g; ++j) {
                    const bath::Kappa kap = kernel.at(a + dt * rule.x[i], b + dt * rule.x[j], nu);
                    sum += rule.w[i] * rule.w[j] * cplx{kap.r, kap.i};
                }
            }
            c.cross(k, kp) = dt * dt * sum;
        }
    }
    return c;
}

InfluenceCoefficients discretize_action(const bath::BathSpec& bath, const PathGrid& grid, double nu,
                                        int gauss_order) {
    bath.validate();
    return discretize_action(bath::harmonic_kernel(bath), grid, nu, gauss_order);
}

cplx pair_term(const InfluenceCoefficients& c, const CTable& cross, int k, int kp, double x, double xp,
               double y, double yp) {
    if (k == kp) {
        return -(x * x + y * y) * c.eta_r(k, k) + kI * ((x * x - y * y) * c.eta_i(k, k)) + x * y * cross(k, k);
    }
    return -(x * xp + y * yp) * c.eta_r(k, kp) + kI * ((x * xp - y * yp) * c.eta_i(k, kp)) +
           x * yp * cross(k, kp) + xp * y * cross(kp, k);
}

cplx fv_exponent(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues) {
    return path_exponent(c, c.unshifted_cross(), pair, eigenvalues);
}

cplx fv_weight(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues) {
    return std::exp(fv_exponent(c, pair, eigenvalues));
}

cplx heat_gf_exponent(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues) {
    return path_exponent(c, c.cross, pair, eigenvalues);
}

cplx heat_gf_weight(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues) {
    return std::exp(heat_gf_exponent(c, pair, eigenvalues));
}

// ---------------------------------------------------------------- higher orders

const cumulants::AmplitudeSet3& HigherOrderKernels::at3(int s, int u, int v) const {
    const int n = grid.n_slices;
    return a3[static_cast<std::size_t>((s * n + u) * n + v)];
}

const cumulants::AmplitudeSet4& HigherOrderKernels::at4(int s, int u, int v, int w) const {
    const int n = grid.n_slices;
    return a4[static_cast<std::size_t>(((s * n + u) * n + v) * n + w)];
}

bool HigherOrderKernels::is_zero(double tol) const {
    for (const auto& x : a3)
        if (std::abs(x.a) > tol || std::abs(x.b) > tol || std::abs(x.c) > tol || std::abs(x.d) > tol) return false;
    for (const auto& x : a4)
        for (const cplx& v : x.a)
            if (std::abs(v) > tol) return false;
    return true;
}

HigherOrderKernels zero_higher_order_kernels(const PathGrid& grid, int order) {
    grid.validate();
    if (order != 3 && order != 4) throw std::invalid_argument("order: higher-order kernels need 3 or 4");
    const auto n = static_cast<std::size_t>(grid.n_slices);
    HigherOrderKernels k;
    k.grid = grid;
    k.order = order;
    k.a3.assign(n * n * n, {});
    if (order == 4) k.a4.assign(n * n * n * n, {});
    return k;
}

HigherOrderKernels build_higher_order_kernels(const cumulants::TraceSource3& traces,
                                              const cumulants::Cumulant4Source& g4, const PathGrid& grid,
                                              int order, const std::optional<bath::Ramp>& ramp) {
    HigherOrderKernels k = zero_higher_order_kernels(grid, order);
    const int n = grid.n_slices;
    auto window = [&](int slice) { return ramp ? (*ramp)(grid.midpoint(slice)) : 1.0; };
    for (int s = 0; s < n; ++s) {
        for (int u = 0; u < s; ++u) {
            for (int v = 0; v < u; ++v) {
                const double r = window(s) * window(u) * window(v);
                auto a = cumulants::amplitudes3(traces, grid.midpoint(s), grid.midpoint(u), grid.midpoint(v));
                a.a *= r;
                a.b *= r;
                a.c *= r;
                a.d *= r;
                k.a3[static_cast<std::size_t>((s * n + u) * n + v)] = a;
                if (order < 4) continue;
                for (int w = 0; w < v; ++w) {
                    const double r4 = r * window(w);
                    auto b = cumulants::amplitudes4(g4, grid.midpoint(s), grid.midpoint(u), grid.midpoint(v),
                                                    grid.midpoint(w));
                    for (cplx& x : b.a) x *= r4;
                    k.a4[static_cast<std::size_t>(((s * n + u) * n + v) * n + w)] = b;
                }
            }
        }
    }
    return k;
}

cplx higher_order_increment(const HigherOrderKernels& k, int s, const std::vector<double>& zp,
                            const std::vector<double>& zm) {
    const double zs = zm[static_cast<std::size_t>(s)];
    if (zs == 0.0) return {0.0, 0.0};
    const double dt = k.grid.dt();
    cplx third{0.0, 0.0};
    cplx fourth{0.0, 0.0};
    for (int u = 0; u < s; ++u) {
        const double pu = zp[static_cast<std::size_t>(u)];
        const double mu = zm[static_cast<std::size_t>(u)];
        for (int v = 0; v < u; ++v) {
            const double pv = zp[static_cast<std::size_t>(v)];
            const double mv = zm[static_cast<std::size_t>(v)];
            const auto& a = k.at3(s, u, v);
            third += pu * pv * a.a + pu * mv * a.b + mu * pv * a.c + mu * mv * a.d;
            if (k.order < 4) continue;
            for (int w = 0; w < v; ++w) {
                const double pw = zp[static_cast<std::size_t>(w)];
                const double mw = zm[static_cast<std::size_t>(w)];
                const auto& b = k.at4(s, u, v, w);
                for (std::size_t row = 0; row < 8; ++row) {
                    const auto& br = cumulants::kFourthOrderRows[row];
                    fourth += zeta(br[0], pu, mu) * zeta(br[1], pv, mv) * zeta(br[2], pw, mw) * b.a[row];
                }
            }
        }
    }
    return zs * (0.25 * kI * dt * dt * dt * third + 0.125 * dt * dt * dt * dt * fourth);
}

cplx higher_order_weight(const HigherOrderKernels& k, const PathGrid& grid, const PathPair& pair,
                         const Eigen::VectorXd& eigenvalues) {
    if (!(k.grid == grid)) throw std::invalid_argument("higher_order_weight: kernels were built on another grid");
    const int n = grid.n_slices;
    check_pair(pair, n, eigenvalues.size());
    std::vector<double> zp(static_cast<std::size_t>(n));
    std::vector<double> zm(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < zp.size(); ++j) {
        zp[j] = eigenvalues(pair.q[j]) + eigenvalues(pair.q_tilde[j]);
        zm[j] = eigenvalues(pair.q[j]) - eigenvalues(pair.q_tilde[j]);
    }
    cplx total{0.0, 0.0};
    for (int s = 0; s < n; ++s) total += higher_order_increment(k, s, zp, zm);
    return std::exp(total);
}

// ---------------------------------------------------------------- path sum

double path_pair_count(Eigen::Index dim, int n_slices) {
    return std::pow(static_cast<double>(dim), 2.0 * n_slices);
}

int resolve_threads(int requested) {
    int n = requested;
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (const char* env = std::getenv("FVHEAT_THREADS")) {
            try {
                const int cap = std::stoi(env);
                if (cap >= 1) n = std::min(std::max(n, 1), cap);
            } catch (const std::exception&) {
                throw std::invalid_argument(std::string("FVHEAT_THREADS: not an integer: '") + env + "'");
            }
        }
    }
    return std::max(n, 1);
}

namespace {

// Everything the enumeration needs, indexed by combined slice state a = q·d + q̃.
struct SumPlan {
    int n{0};
    int states{0};
    std::vector<cplx> start;     // [a]
    std::vector<cplx> transfer;  // [a·D + b], b on the previous slice
    std::vector<cplx> diag;      // [k·D + a]
    std::vector<cplx> pairs;     // [((k·n + k′)·D + a)·D + b], k′ < k
    std::vector<double> zp;      // [a]
    std::vector<double> zm;
    std::vector<const HigherOrderKernels*> higher;
};

class Enumerator {
public:
    explicit Enumerator(const SumPlan& plan)
        : p_(plan),
          path_(static_cast<std::size_t>(plan.n)),
          exponent_(static_cast<std::size_t>(plan.n)),
          amplitude_(static_cast<std::size_t>(plan.n)),
          zp_(static_cast<std::size_t>(plan.n)),
          zm_(static_cast<std::size_t>(plan.n)),
          acc_(static_cast<std::size_t>(plan.states), cplx{0.0, 0.0}) {}

    // Sums all completions of the given prefix into a per-endpoint vector.
    std::vector<cplx> run(const std::vector<int>& prefix) {
        std::fill(acc_.begin(), acc_.end(), cplx{0.0, 0.0});
        for (std::size_t k = 0; k < prefix.size(); ++k) place(static_cast<int>(k), prefix[k]);
        if (static_cast<int>(prefix.size()) == p_.n) {
            finish();
        } else {
            descend(static_cast<int>(prefix.size()));
        }
        return acc_;
    }

private:
    void place(int k, int a) {
        const auto k_ = static_cast<std::size_t>(k);
        const auto D = static_cast<std::size_t>(p_.states);
        const auto n = static_cast<std::size_t>(p_.n);
        path_[k_] = a;
        zp_[k_] = p_.zp[static_cast<std::size_t>(a)];
        zm_[k_] = p_.zm[static_cast<std::size_t>(a)];
        cplx e = p_.diag[k_ * D + static_cast<std::size_t>(a)];
        const cplx* row = p_.pairs.data() + ((k_ * n) * D + static_cast<std::size_t>(a)) * D;
        for (std::size_t kp = 0; kp < k_; ++kp) e += row[kp * D * D + static_cast<std::size_t>(path_[kp])];
        for (const auto* h : p_.higher) e += higher_order_increment(*h, k, zp_, zm_);
        if (k == 0) {
            exponent_[0] = e;
            amplitude_[0] = p_.start[static_cast<std::size_t>(a)];
        } else {
            exponent_[k_] = exponent_[k_ - 1] + e;
            amplitude_[k_] =
                amplitude_[k_ - 1] * p_.transfer[static_cast<std::size_t>(a) * D + static_cast<std::size_t>(path_[k_ - 1])];
        }
    }

    void finish() {
        const auto last = static_cast<std::size_t>(p_.n - 1);
        acc_[static_cast<std::size_t>(path_[last])] += amplitude_[last] * std::exp(exponent_[last]);
    }

    void descend(int k) {
        for (int a = 0; a < p_.states; ++a) {
            place(k, a);
            if (k + 1 == p_.n) {
                finish();
            } else {
                descend(k + 1);
            }
        }
    }

    const SumPlan& p_;
    std::vector<int> path_;
    std::vector<cplx> exponent_;
    std::vector<cplx> amplitude_;
    std::vector<double> zp_;
    std::vector<double> zm_;
    std::vector<cplx> acc_;
};

std::vector<cplx> tree_reduce(std::vector<std::vector<cplx>> parts) {
    while (parts.size() > 1) {
        std::vector<std::vector<cplx>> next;
        for (std::size_t j = 0; j + 1 < parts.size(); j += 2) {
            for (std::size_t e = 0; e < parts[j].size(); ++e) parts[j][e] += parts[j + 1][e];
            next.push_back(std::move(parts[j]));
        }
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return parts.front();
}

constexpr std::size_t kMinChunks = 64;

}  // namespace

PathSumResult path_sum(const SystemModel& system, const std::vector<BathInfluence>& baths, const DenseOp& rho_s0,
                       Mode mode, const PathSumOptions& options) {
    if (baths.empty()) throw std::invalid_argument("path_sum: needs at least one bath");
    const PathGrid grid = baths.front().coeffs.grid;
    grid.validate();
    for (const auto& b : baths) {
        if (!(b.coeffs.grid == grid)) throw std::invalid_argument("path_sum: baths use different grids");
        if (b.higher && !(b.higher->grid == grid))
            throw std::invalid_argument("path_sum: higher-order kernels were built on another grid");
        if (mode == Mode::GeneratingFunction && b.counted && b.higher)
            throw std::invalid_argument(
                "path_sum: higher-order kernels of the counted bath carry no counting shift; use order 2");
    }
    const Eigen::Index d = system.dim();
    validate_density(rho_s0, d);

    PathSumResult result;
    result.path_pairs = path_pair_count(d, grid.n_slices);
    if (result.path_pairs > options.budget) {
        std::ostringstream msg;
        msg << "path_sum: " << result.path_pairs << " path pairs required, budget is " << options.budget;
        throw BudgetExceeded(msg.str(), result.path_pairs, options.budget);
    }

    const int n = grid.n_slices;
    const auto D = static_cast<std::size_t>(d * d);
    const auto nn = static_cast<std::size_t>(n);
    const Eigen::VectorXd& ev = system.x_eigenvalues;
    const DenseOp& V = system.x_eigenbasis;
    const DenseOp u_half = V.adjoint() * evolution(system.h_s, 0.5 * grid.dt()) * V;
    const DenseOp u_full = V.adjoint() * evolution(system.h_s, grid.dt()) * V;
    const DenseOp start = u_half * (V.adjoint() * rho_s0 * V) * u_half.adjoint();

    SumPlan plan;
    plan.n = n;
    plan.states = static_cast<int>(D);
    plan.start.resize(D);
    plan.transfer.resize(D * D);
    plan.zp.resize(D);
    plan.zm.resize(D);
    auto q_of = [d](std::size_t a) { return static_cast<Eigen::Index>(a) / d; };
    auto qt_of = [d](std::size_t a) { return static_cast<Eigen::Index>(a) % d; };
    for (std::size_t a = 0; a < D; ++a) {
        plan.start[a] = start(q_of(a), qt_of(a));
        plan.zp[a] = ev(q_of(a)) + ev(qt_of(a));
        plan.zm[a] = ev(q_of(a)) - ev(qt_of(a));
        for (std::size_t b = 0; b < D; ++b)
            plan.transfer[a * D + b] = u_full(q_of(a), q_of(b)) * std::conj(u_full(qt_of(a), qt_of(b)));
    }

    plan.diag.assign(nn * D, cplx{0.0, 0.0});
    plan.pairs.assign(nn * nn * D * D, cplx{0.0, 0.0});
    for (const auto& b : baths) {
        const CTable cross = (mode == Mode::GeneratingFunction && b.counted) ? b.coeffs.cross : b.coeffs.unshifted_cross();
        for (int k = 0; k < n; ++k) {
            const auto k_ = static_cast<std::size_t>(k);
            for (std::size_t a = 0; a < D; ++a) {
                const double x = ev(q_of(a));
                const double y = ev(qt_of(a));
                plan.diag[k_ * D + a] += pair_term(b.coeffs, cross, k, k, x, x, y, y);
                for (int kp = 0; kp < k; ++kp) {
                    for (std::size_t c = 0; c < D; ++c) {
                        plan.pairs[((k_ * nn + static_cast<std::size_t>(kp)) * D + a) * D + c] +=
                            pair_term(b.coeffs, cross, k, kp, x, ev(q_of(c)), y, ev(qt_of(c)));
                    }
                }
            }
        }
        if (b.higher) plan.higher.push_back(&*b.higher);
    }

    // Chunks are prefixes of a fixed depth, independent of the worker count.
    int depth = 0;
    std::size_t n_chunks = 1;
    while (depth < n && n_chunks < kMinChunks) {
        n_chunks *= D;
        ++depth;
    }
    std::vector<std::vector<cplx>> partials(n_chunks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        Enumerator e(plan);
        std::vector<int> prefix(static_cast<std::size_t>(depth));
        for (std::size_t c = next++; c < n_chunks; c = next++) {
            std::size_t rest = c;
            for (int j = depth - 1; j >= 0; --j) {
                prefix[static_cast<std::size_t>(j)] = static_cast<int>(rest % D);
                rest /= D;
            }
            partials[c] = e.run(prefix);
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(options.threads)), n_chunks);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    const std::vector<cplx> sum = tree_reduce(std::move(partials));

    DenseOp m(d, d);
    for (std::size_t a = 0; a < D; ++a) m(q_of(a), qt_of(a)) = sum[a];
    const DenseOp rho = V * (u_half * m * u_half.adjoint()) * V.adjoint();
    if (mode == Mode::Density) {
        result.density = rho;
    }
    result.gf = rho.trace();
    return result;
}

// ---------------------------------------------------------------- CSV

void write_coefficients_csv(std::ostream& os, const InfluenceCoefficients& c) {
    os << "t_i,t_f,n_slices,nu,gauss_order\n";
    os << format_double(c.grid.t_i) << ',' << format_double(c.grid.t_f) << ',' << c.grid.n_slices << ','
       << format_double(c.nu) << ',' << c.gauss_order << '\n';
    os << "k,kp,eta_r,eta_i,re_cross,im_cross\n";
    for (int k = 0; k < c.grid.n_slices; ++k) {
        for (int kp = 0; kp < c.grid.n_slices; ++kp) {
            os << k << ',' << kp << ',' << format_double(c.eta_r(k, kp)) << ',' << format_double(c.eta_i(k, kp))
               << ',' << format_double(c.cross(k, kp).real()) << ',' << format_double(c.cross(k, kp).imag()) << '\n';
        }
    }
}

InfluenceCoefficients read_coefficients_csv(std::istream& is) {
    const char* who = "read_coefficients_csv";
    expect_row(is, 5, who);
    const auto meta = expect_row(is, 5, who);
    InfluenceCoefficients c;
    c.grid = PathGrid::make(parse_double(meta[0]), parse_double(meta[1]), parse_int(meta[2]));
    c.nu = parse_double(meta[3]);
    c.gauss_order = parse_int(meta[4]);
    const int n = c.grid.n_slices;
    c.eta_r = Table::Zero(n, n);
    c.eta_i = Table::Zero(n, n);
    c.cross = CTable::Zero(n, n);
    expect_row(is, 6, who);
    for (int r = 0; r < n * n; ++r) {
        const auto row = expect_row(is, 6, who);
        const int k = parse_int(row[0]);
        const int kp = parse_int(row[1]);
        if (k < 0 || k >= n || kp < 0 || kp >= n) throw std::runtime_error("read_coefficients_csv: slice out of range");
        c.eta_r(k, kp) = parse_double(row[2]);
        c.eta_i(k, kp) = parse_double(row[3]);
        c.cross(k, kp) = cplx{parse_double(row[4]), parse_double(row[5])};
    }
    return c;
}

void write_higher_order_csv(std::ostream& os, const HigherOrderKernels& k) {
    const int n = k.grid.n_slices;
    os << "t_i,t_f,n_slices,order\n";
    os << format_double(k.grid.t_i) << ',' << format_double(k.grid.t_f) << ',' << n << ',' << k.order << '\n';
    os << "kind,s,u,v,w,values\n";
    auto put = [&os](cplx v) { os << ',' << format_double(v.real()) << ',' << format_double(v.imag()); };
    for (int s = 0; s < n; ++s) {
        for (int u = 0; u < s; ++u) {
            for (int v = 0; v < u; ++v) {
                const auto& a = k.at3(s, u, v);
                os << "a3," << s << ',' << u << ',' << v << ",-1";
                put(a.a);
                put(a.b);
                put(a.c);
                put(a.d);
                os << '\n';
                if (k.order < 4) continue;
                for (int w = 0; w < v; ++w) {
                    os << "a4," << s << ',' << u << ',' << v << ',' << w;
                    for (const cplx& x : k.at4(s, u, v, w).a) put(x);
                    os << '\n';
                }
            }
        }
    }
}

HigherOrderKernels read_higher_order_csv(std::istream& is) {
    const char* who = "read_higher_order_csv";
    expect_row(is, 4, who);
    const auto meta = expect_row(is, 4, who);
    HigherOrderKernels k = zero_higher_order_kernels(
        PathGrid::make(parse_double(meta[0]), parse_double(meta[1]), parse_int(meta[2])), parse_int(meta[3]));
    const int n = k.grid.n_slices;
    expect_row(is, 6, who);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto row = split_csv(line);
        if (row.size() < 5) throw std::runtime_error("read_higher_order_csv: short row");
        const int s = parse_int(row[1]);
        const int u = parse_int(row[2]);
        const int v = parse_int(row[3]);
        const int w = parse_int(row[4]);
        auto value = [&row](std::size_t j) { return cplx{parse_double(row[5 + 2 * j]), parse_double(row[6 + 2 * j])}; };
        const bool ordered3 = s < n && s > u && u > v && v >= 0;
        if (row[0] == "a3" && row.size() == 13 && ordered3) {
            k.a3[static_cast<std::size_t>((s * n + u) * n + v)] = {value(0), value(1), value(2), value(3)};
        } else if (row[0] == "a4" && row.size() == 21 && k.order == 4 && ordered3 && v > w && w >= 0) {
            auto& a = k.a4[static_cast<std::size_t>(((s * n + u) * n + v) * n + w)];
            for (std::size_t j = 0; j < 8; ++j) a.a[j] = value(j);
        } else {
            throw std::runtime_error("read_higher_order_csv: malformed row '" + line + "'");
        }
    }
    return k;
}

}  // namespace fvheat::influence
