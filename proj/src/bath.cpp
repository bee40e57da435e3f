// bath.cpp: Harmonic bath kernels and auxiliary identities

#include "fvheat/bath.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fvheat/format.hpp"

namespace fvheat::bath {

double Mode::ladder_coupling() const { return coupling / std::sqrt(2.0 * mass * omega); }

double Ramp::operator()(double t) const {
    if (t <= t_on || t >= t_off) return 0.0;
    if (width <= 0.0) return 1.0;
    const double rise = (t - t_on) / width;
    const double fall = (t_off - t) / width;
    const double edge = std::min(rise, fall);
    if (edge >= 1.0) return 1.0;
    const double s = std::sin(0.5 * std::numbers::pi * edge);
    return s * s;
}

void BathSpec::validate() const {
    if (modes.empty()) throw std::invalid_argument("bath.modes: mode list is empty");
    if (!(beta > 0.0)) throw std::invalid_argument("bath.beta: must be > 0");
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const auto& m = modes[k];
        const std::string where = "bath.modes[" + std::to_string(k) + "]";
        if (!(m.omega > 0.0)) throw std::invalid_argument(where + ".omega: must be > 0");
        if (!(m.mass > 0.0)) throw std::invalid_argument(where + ".mass: must be > 0");
        if (!std::isfinite(m.coupling)) throw std::invalid_argument(where + ".coupling: not finite");
    }
    if (ramp) {
        if (!(ramp->t_on < ramp->t_off))
            throw std::invalid_argument("bath.ramp: t_on must be < t_off");
        if (!(ramp->width >= 0.0)) throw std::invalid_argument("bath.ramp.width: must be >= 0");
    }
}

double BathSpec::counter_term() const {
    double mu = 0.0;
    for (const auto& m : modes) mu += m.coupling * m.coupling / (2.0 * m.mass * m.omega * m.omega);
    return mu;
}

BathSpec ohmic_discretization(double eta, double omega_c, std::size_t n_modes, double beta) {
    if (n_modes == 0) throw std::invalid_argument("ohmic_discretization: n_modes must be >= 1");
    if (!(eta > 0.0) || !(omega_c > 0.0))
        throw std::invalid_argument("ohmic_discretization: eta and omega_c must be > 0");
    BathSpec bath;
    bath.beta = beta;
    const double n = static_cast<double>(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = -omega_c * std::log(1.0 - (static_cast<double>(k) + 0.5) / n);
        // J(ω_k)/ρ(ω_k) = (π/2) c_k²/ω_k with mode density ρ(ω) = n e^{−ω/ω_c}/ω_c
        const double c2 = 2.0 / std::numbers::pi * w * w * eta * omega_c / n;
        bath.modes.push_back({w, 1.0, std::sqrt(c2)});
    }
    bath.validate();
    return bath;
}

Kappa kappa(const BathSpec& bath, double tau) {
    Kappa k;
    for (const auto& m : bath.modes) {
        const double a = m.strength();
        const double x = m.omega * tau;
        k.i += a * std::sin(x);
        k.r += a * std::cos(x) / std::tanh(0.5 * m.omega * bath.beta);
    }
    return k;
}

Kappa KernelSource::at(double s, double s_prime, double shift) const {
    Kappa k = stationary(s - s_prime + shift);
    if (ramp) {
        const double w = (*ramp)(s) * (*ramp)(s_prime);
        k.r *= w;
        k.i *= w;
    }
    return k;
}

KernelSource harmonic_kernel(const BathSpec& bath) {
    bath.validate();
    return KernelSource{[bath](double tau) { return kappa(bath, tau); }, bath.ramp};
}

KernelTable build_kernel_table(const BathSpec& bath, double tau_max, std::size_t n_samples,
                               double nu) {
    bath.validate();
    return build_kernel_table([&bath](double tau) { return kappa(bath, tau); }, tau_max, n_samples, nu);
}

KernelTable build_kernel_table(const std::function<Kappa(double)>& stationary, double tau_max,
                               std::size_t n_samples, double nu) {
    if (n_samples < 2) throw std::invalid_argument("build_kernel_table: n_samples must be >= 2");
    if (!(tau_max > 0.0)) throw std::invalid_argument("build_kernel_table: tau_max must be > 0");

    KernelTable table;
    table.nu = nu;
    const double step = 2.0 * tau_max / static_cast<double>(n_samples - 1);
    for (std::size_t j = 0; j < n_samples; ++j) {
        // Mirror-exact grid: sample j and n-1-j are negatives of each other.
        const double tau = (2.0 * static_cast<double>(j) < static_cast<double>(n_samples - 1))
                               ? -tau_max + step * static_cast<double>(j)
                               : tau_max - step * static_cast<double>(n_samples - 1 - j);
        const Kappa k = stationary(tau);
        const Kappa kp = stationary(tau + nu);
        const Kappa km = stationary(tau - nu);
        table.tau.push_back(tau);
        table.kappa_r.push_back(k.r);
        table.kappa_i.push_back(k.i);
        table.shifted_plus.emplace_back(kp.r, kp.i);
        table.shifted_minus.emplace_back(km.r, -km.i);
    }
    return table;
}

void write_kernel_csv(std::ostream& os, const KernelTable& t) {
    os << "tau,kappa_r,kappa_i,re_shifted_plus,im_shifted_plus,re_shifted_minus,im_shifted_minus\n";
    for (std::size_t j = 0; j < t.tau.size(); ++j) {
        os << format_double(t.tau[j]) << ',' << format_double(t.kappa_r[j]) << ','
           << format_double(t.kappa_i[j]) << ',' << format_double(t.shifted_plus[j].real()) << ','
           << format_double(t.shifted_plus[j].imag()) << ','
           << format_double(t.shifted_minus[j].real()) << ','
           << format_double(t.shifted_minus[j].imag()) << '\n';
    }
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

cplx pair_correlation(const KernelSource& source, Branch d1, Branch d2, double t1, double t2,
                      double nu) {
    const double tau = t1 - t2;
    if (d1 == d2) {
        const Kappa k = source.at(t1, t2);
        const double s = (d1 == Branch::Plus) ? -sign(tau) : sign(tau);
        return {k.r, s * k.i};
    }
    if (d1 == Branch::Plus) {
        const Kappa k = source.at(t1, t2, nu);
        return {k.r, k.i};
    }
    const Kappa k = source.at(t1, t2, -nu);
    return {k.r, -k.i};
}

cplx pair_correlation(const BathSpec& bath, Branch d1, Branch d2, double t1, double t2,
                      double nu) {
    return pair_correlation(harmonic_kernel(bath), d1, d2, t1, t2, nu);
}

namespace {

cplx cot(cplx a) { return std::cos(a) / std::sin(a); }
cplx csc(cplx a) { return 1.0 / std::sin(a); }

}  // namespace

AuxTrig make_aux_trig(double omega, double nu, double beta, double t) {
    AuxTrig a;
    a.omega = omega;
    a.nu = nu;
    a.beta = beta;
    a.t = t;
    const cplx wt{omega * t, 0.0};
    const cplx wn{omega * nu, 0.0};
    const cplx wz = omega * cplx{nu, -beta};
    a.x = cot(wt);
    a.xp = csc(wt);
    a.y = cot(wn);
    a.yp = csc(wn);
    a.z = cot(wz);
    a.zp = csc(wz);
    a.delta = 2.0 * (a.zp * a.yp - a.y * a.z - 1.0);
    return a;
}

double AuxResiduals::max() const { return std::max({delta, cross, difference}); }

AuxResiduals check_aux_identities(double omega, double nu, double beta) {
    if (nu == 0.0) throw std::invalid_argument("check_aux_identities: nu must be nonzero");
    if (!(omega > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("check_aux_identities: omega and beta must be > 0");
    const AuxTrig a = make_aux_trig(omega, nu, beta);
    const double wn = omega * nu;
    const double coth = 1.0 / std::tanh(0.5 * omega * beta);
    const cplx I{0.0, 1.0};

    const cplx delta_closed = 2.0 * csc(omega * cplx{nu, -beta}) * csc(cplx{wn, 0.0}) *
                              (1.0 - std::cosh(omega * beta));
    const cplx cross_closed = 0.5 * std::cos(wn) + 0.5 * I * std::sin(wn) * coth;
    const cplx diff_closed = -0.5 * I * std::cos(wn) * coth + 0.5 * std::sin(wn);

    AuxResiduals r;
    r.delta = std::abs(a.delta - delta_closed);
    r.cross = std::abs((a.y * a.zp - a.yp * a.z) / a.delta - cross_closed);
    r.difference = std::abs((a.zp - a.yp) / a.delta - diff_closed);
    return r;
}

}  // namespace fvheat::bath
