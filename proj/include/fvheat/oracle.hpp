// oracle.hpp: Exact reference dynamics of system ⊗ truncated Fock baths
//
// Everything here is brute force: the bath is a finite Fock space, the total Hamiltonian is
// a dense matrix and evolution is exact diagonalization. Bath operators are stored in the
// eigenbasis of H_B (the Fock basis for both harmonic and Kerr baths), so Heisenberg-picture
// operators and e^{±iνH_B} are elementwise phases.

#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "fvheat/bath.hpp"
#include "fvheat/cumulants.hpp"
#include "fvheat/system.hpp"
#include "fvheat/types.hpp"

namespace fvheat::oracle {

struct ThermalState {
    Eigen::VectorXd populations;  // diagonal of e^{−βH_B}/Z in the H_B eigenbasis
};

// H_B (diagonal), the coupling operator Y and the initial thermal state, all in the
// eigenbasis of H_B.
struct BathOperators {
    Eigen::VectorXd energies;
    DenseOp y;
    ThermalState thermal;

    Eigen::Index dim() const { return energies.size(); }

    // e^{iH_B t} Y e^{−iH_B t}
    DenseOp heisenberg_y(double t) const;
};

struct TruncationPolicy {
    double leakage_tol{1e-6};  // max thermal population of any mode's top Fock level
    std::optional<std::vector<int>> n_fock;  // explicit per-mode levels; auto when empty
};

// Harmonic (kerr = 0) or Kerr bath on a truncated Fock space. H_B = Σ ω_k n_k + λ n_k(n_k − 1),
// Y = Σ c'_k (a_k + a_k†). Construction throws LeakageError when an explicit truncation keeps
// too much thermal weight in a top level.
class TruncatedBath {
public:
    TruncatedBath(bath::BathSpec spec, double kerr = 0.0, TruncationPolicy policy = {});

    const bath::BathSpec& spec() const { return spec_; }
    double kerr() const { return kerr_; }
    const std::vector<int>& n_fock() const { return n_fock_; }
    double leakage() const { return leakage_; }
    const BathOperators& ops() const { return ops_; }
    bool is_harmonic() const { return kerr_ == 0.0; }

    // Exact stationary C(τ) = tr{Y(τ) Y ρ_B} of the truncated bath, wrapped with the
    // bath's coupling window.
    bath::KernelSource exact_kernel() const;

private:
    bath::BathSpec spec_;
    double kerr_;
    std::vector<int> n_fock_;
    double leakage_{0.0};
    BathOperators ops_;
};

// Smallest n >= 2 whose top-level thermal population is below tol for a single mode.
int auto_fock_levels(double omega, double kerr, double beta, double tol);

struct CorrelationTensor {
    cumulants::Branches branches;
    cumulants::Times times;
    double nu{0.0};
    cplx value;

    std::size_t order() const { return times.size(); }
};

// tr{L_1 ⋯ L_p ρ R_1 ⋯ R_q} with the operator lists taken verbatim (no ordering applied).
// Left operators are evaluated at t + nu.
cplx sandwich_trace(const BathOperators& ops, const std::vector<double>& left_times,
                    const std::vector<double>& right_times, double nu = 0.0);

// Branch-indexed super-operator correlator: + operators go left of ρ in chronological
// order (latest leftmost) at shifted times t + ν, − operators go right of ρ in
// anti-chronological order (latest rightmost).
CorrelationTensor multitime_correlator(const BathOperators& ops, const cumulants::Branches& branches,
                                       const cumulants::Times& times, double nu);

cumulants::CorrelatorSource correlator_source(const BathOperators& ops, double nu);

// Plain operator-ordered correlator tr{Y(t_1) ⋯ Y(t_n) ρ}; branch labels are ignored.
cumulants::CorrelatorSource operator_ordered_source(const BathOperators& ops);

// Order 1..4; throws std::invalid_argument above that.
cumulants::CumulantTensor cumulant(const BathOperators& ops, const cumulants::Branches& branches,
                                   const cumulants::Times& times, double nu);

using PairSource = std::function<cplx(Branch, Branch, double, double)>;

PairSource oracle_pair_source(const BathOperators& ops, double nu);

// Σ over perfect matchings of Π C^{d_j d_k}(t_j, t_k). Rejects odd lengths.
cplx wick_reconstruct(const PairSource& pairs, const cumulants::Branches& branches,
                      const cumulants::Times& times);

// Operator traces used by the higher-order amplitudes.
cumulants::TraceSource2 trace_source2(const BathOperators& ops);
cumulants::TraceSource3 trace_source3(const BathOperators& ops);
cumulants::Cumulant4Source cumulant4_source(const BathOperators& ops);

struct OracleSettings {
    Eigen::Index max_dim{4096};
    int n_steps{200};  // midpoint steps, used only when a coupling window makes H time dependent
};

// Exact evolution of system ⊗ baths from a product initial state with thermal baths.
// Diagonalizes the total Hamiltonian once; every query reuses it.
class ExactEvolver {
public:
    ExactEvolver(SystemModel system, std::vector<TruncatedBath> baths, OracleSettings settings = {});

    Eigen::Index total_dim() const { return total_dim_; }
    Eigen::Index bath_dim() const { return bath_dim_; }
    const DenseOp& hamiltonian() const { return hamiltonian_; }

    // Full-space propagator over [t_i, t_f].
    DenseOp propagator(double t_i, double t_f) const;

    DenseOp initial_state(const DenseOp& rho_s0) const;
    DenseOp evolve_full(const DenseOp& rho_full, double t_i, double t_f) const;
    DenseOp reduced_density(const DenseOp& rho_s0, double t_i, double t_f) const;

    // Γ(ν) = tr_B{e^{iνH_C} U e^{−iνH_C} ρ(0) U†} for the counted bath.
    DenseOp gamma(const DenseOp& rho_s0, std::size_t counted, double nu, double t_i, double t_f) const;
    cplx generating_function(const DenseOp& rho_s0, std::size_t counted, double nu, double t_i,
                             double t_f) const;

    // tr{H_C (ρ(t) − ρ(0))}
    double heat_change(const DenseOp& rho_s0, std::size_t counted, double t_i, double t_f) const;

    // −i ∂_ν G at ν = 0 by central differences with one Richardson step.
    cplx first_moment(const DenseOp& rho_s0, std::size_t counted, double t_i, double t_f,
                      double step = 1e-4) const;

    DenseOp partial_trace_bath(const DenseOp& rho_full) const;

private:
    Eigen::VectorXd counted_energies(std::size_t counted) const;
    bool time_dependent() const;
    DenseOp hamiltonian_at(double t) const;
    DenseOp compute_propagator(double t_i, double t_f) const;

    SystemModel system_;
    std::vector<TruncatedBath> baths_;
    OracleSettings settings_;
    Eigen::Index bath_dim_{1};
    Eigen::Index total_dim_{1};
    DenseOp h_free_;
    std::vector<DenseOp> couplings_;  // X ⊗ Y_b embedded in the full space
    DenseOp hamiltonian_;
    Eigen::VectorXd eigenvalues_;
    DenseOp eigenvectors_;

    // Last propagator, reused while repeated queries ask for the same interval.
    struct Cache {
        std::mutex mutex;
        double t_i{0.0};
        double t_f{0.0};
        std::shared_ptr<const DenseOp> u;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Spec-shaped conveniences over ExactEvolver; t_i = 0.
DenseOp reduced_density(const SystemModel& system, const std::vector<TruncatedBath>& baths,
                        const DenseOp& rho_s0, double t, int n_steps = 200);
cplx generating_function_exact(const SystemModel& system, const std::vector<TruncatedBath>& baths,
                               std::size_t counted, const DenseOp& rho_s0, double nu, double t);

}  // namespace fvheat::oracle
