// bath.hpp: Harmonic bath models, two-time kernels and counting-shifted cross kernels

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fvheat/types.hpp"

namespace fvheat::bath {

struct Mode {
    double omega{1.0};     // angular frequency
    double mass{1.0};
    double coupling{0.0};  // c_k

    // c_k^2 / (2 m_k ω_k)
    double strength() const { return coupling * coupling / (2.0 * mass * omega); }
    // c'_k = c_k / sqrt(2 m_k ω_k), the prefactor of (a_k + a_k†)
    double ladder_coupling() const;
};

// Smooth switch-on/switch-off window for the system-bath coupling.
// Zero before t_on and after t_off, one in between, with cos² edges of the given width.
struct Ramp {
    double t_on{0.0};
    double t_off{1.0};
    double width{0.0};

    double operator()(double t) const;
};

struct BathSpec {
    std::vector<Mode> modes;
    double beta{1.0};
    std::optional<Ramp> ramp;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    // Caldeira-Leggett counter-term coefficient Σ c_k² / (2 m_k ω_k²).
    double counter_term() const;
};

// Equal-weight discretization of an Ohmic density J(ω) = η ω e^{−ω/ω_c} into n unit-mass
// modes, with J(ω) = (π/2) Σ c_k²/(m_k ω_k) δ(ω − ω_k). Frequencies sit at the midpoints of
// equal-area bins of J(ω)/ω. A convenience constructor, not a model of any particular bath.
BathSpec ohmic_discretization(double eta, double omega_c, std::size_t n_modes, double beta);

struct Kappa {
    double r{0.0};  // noise kernel κ_r
    double i{0.0};  // dissipation kernel κ_i

    // C(τ) = κ_r(τ) − iκ_i(τ)
    cplx correlation() const { return {r, -i}; }
};

// Constant-coupling kernels at time difference tau.
Kappa kappa(const BathSpec& bath, double tau);

// A stationary pair correlation C(τ) = ⟨Y(τ)Y(0)⟩ plus an optional coupling window.
// Harmonic baths use the closed-form mode sum; other baths plug in an exact correlator.
struct KernelSource {
    std::function<Kappa(double)> stationary;
    std::optional<Ramp> ramp;

    // r(s) r(s') κ(s − s' + shift)
    Kappa at(double s, double s_prime, double shift = 0.0) const;
};

KernelSource harmonic_kernel(const BathSpec& bath);

struct KernelTable {
    std::vector<double> tau;
    std::vector<double> kappa_r;
    std::vector<double> kappa_i;
    double nu{0.0};
    std::vector<cplx> shifted_plus;   // κ_r(τ+ν) + iκ_i(τ+ν)
    std::vector<cplx> shifted_minus;  // κ_r(τ−ν) − iκ_i(τ−ν)
};

KernelTable build_kernel_table(const BathSpec& bath, double tau_max, std::size_t n_samples,
                               double nu);
// Same table for any stationary kernel, e.g. the exact correlator of an an-harmonic bath.
KernelTable build_kernel_table(const std::function<Kappa(double)>& stationary, double tau_max,
                               std::size_t n_samples, double nu);

// Columns: tau,kappa_r,kappa_i,re_shifted_plus,im_shifted_plus,re_shifted_minus,im_shifted_minus
void write_kernel_csv(std::ostream& os, const KernelTable& table);

// Branch-indexed pair correlation C^{d1 d2}(t1, t2) of the counting-shifted bath.
cplx pair_correlation(const BathSpec& bath, Branch d1, Branch d2, double t1, double t2, double nu);
cplx pair_correlation(const KernelSource& source, Branch d1, Branch d2, double t1, double t2,
                      double nu);

// Auxiliary trigonometric quantities of the harmonic-oscillator counting propagator (ħ = 1).
struct AuxTrig {
    double omega{0.0};
    double nu{0.0};
    double beta{0.0};
    double t{1.0};
    cplx x, xp;  // cot(ωt), csc(ωt)
    cplx y, yp;  // cot(ων), csc(ων)
    cplx z, zp;  // cot(ω(ν − iβ)), csc(ω(ν − iβ))
    cplx delta;  // 2(z'y' − yz − 1)
};

AuxTrig make_aux_trig(double omega, double nu, double beta, double t = 1.0);

struct AuxResiduals {
    double delta{0.0};
    double cross{0.0};     // (yz' − y'z)/Δ
    double difference{0.0};  // (z' − y')/Δ

    double max() const;
};

// Absolute residuals of the three closed-form simplifications. Rejects nu == 0.
AuxResiduals check_aux_identities(double omega, double nu, double beta);

}  // namespace fvheat::bath
