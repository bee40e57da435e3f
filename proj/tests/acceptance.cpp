// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "fvheat/bath.hpp"
#include "fvheat/commands.hpp"
#include "fvheat/config.hpp"
#include "fvheat/cumulants.hpp"
#include "fvheat/oracle.hpp"

using namespace fvheat;
using namespace fvheat::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs{FVHEAT_CONFIG_DIR};
const char* const kBinary = FVHEAT_BINARY;

struct Sampler {
    std::mt19937_64 rng;
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    Branch branch() { return rng() % 2 == 0 ? Branch::Plus : Branch::Minus; }
    cumulants::Branches branches(std::size_t n) {
        cumulants::Branches b;
        for (std::size_t j = 0; j < n; ++j) b.push_back(branch());
        return b;
    }
    cumulants::Times times(std::size_t n, double lo, double hi) {
        cumulants::Times t;
        for (std::size_t j = 0; j < n; ++j) t.push_back(uniform(lo, hi));
        return t;
    }
};

double max_abs(const DenseOp& m) { return m.cwiseAbs().maxCoeff(); }

int failures = 0;

// Runs one criterion; `body` fills the detail text and returns whether it holds.
void criterion(int id, const char* name, double time_limit, const std::function<bool(std::ostringstream&)>& body) {
    std::ostringstream detail;
    detail.precision(3);
    detail << std::scientific;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit > 0.0 && secs > time_limit) {
        ok = false;
        detail << "; too slow";
    }
    if (!ok) ++failures;
    std::printf("%s %2d %-32s %s; %.2f s", ok ? "PASS" : "FAIL", id, name, detail.str().c_str(), secs);
    if (time_limit > 0.0) std::printf(" (limit %.0f s)", time_limit);
    std::printf("\n");
    std::fflush(stdout);
}

RunConfig pinned() { return parse_config(kConfigs / "spinboson_weak.cfg"); }

RunConfig pinned_kerr() { return parse_config(kConfigs / "kerr_bath.cfg"); }

oracle::TruncatedBath tight_bath(const bath::BathSpec& spec, double kerr) {
    oracle::TruncationPolicy pol;
    pol.leakage_tol = 1e-10;
    return oracle::TruncatedBath(spec, kerr, pol);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
    criterion(1, "zero-shift collapse", 10.0, [](std::ostringstream& d) {
        const RunConfig cfg = pinned();
        const auto baths = truncated_baths(cfg);
        const DenseOp rho = path_density(cfg, baths);
        const cplx g = path_generating_function(cfg, baths, 0.0);
        const cplx g_oracle = make_evolver(cfg, baths).generating_function(cfg.rho0, cfg.counted_bath, 0.0,
                                                                           cfg.grid.t_i, cfg.grid.t_f);
        const double collapse = std::abs(g - rho.trace());
        const double unit = std::abs(g - 1.0);
        const double unit_oracle = std::abs(g_oracle - 1.0);
        d << "|G(0)-tr rho| = " << collapse << " (< 1e-10), |G(0)-1| = " << unit << ", oracle " << unit_oracle
          << " (< 1e-8)";
        return collapse < 1e-10 && unit < 1e-8 && unit_oracle < 1e-8;
    });

    criterion(2, "engine equivalence", 120.0, [](std::ostringstream& d) {
        RunConfig cfg = pinned();
        const auto baths = truncated_baths(cfg);
        const DenseOp exact = make_evolver(cfg, baths).reduced_density(cfg.rho0, cfg.grid.t_i, cfg.grid.t_f);
        const double e6 = max_abs(path_density(cfg, baths) - exact);
        cfg.grid = influence::PathGrid::make(cfg.grid.t_i, cfg.grid.t_f, 12);
        const double e12 = max_abs(path_density(cfg, baths) - exact);
        d << "diff(6) = " << e6 << " (< 5e-3), diff(12) = " << e12 << ", ratio " << std::fixed << e6 / e12
          << " (>= 3)";
        return e6 < 5e-3 && e6 / e12 >= 3.0;
    });

    criterion(3, "time-shift kernel theorem", 30.0, [](std::ostringstream& d) {
        const RunConfig cfg = pinned();
        const oracle::TruncatedBath tb = tight_bath(cfg.baths[0].spec, 0.0);
        Sampler s{std::mt19937_64(101)};
        double worst = 0.0;
        const cumulants::Branches pm{Branch::Plus, Branch::Minus};
        for (int j = 0; j < 20; ++j) {
            const double t1 = s.uniform(0.0, 3.0);
            const double t2 = s.uniform(0.0, 3.0);
            const double nu = s.uniform(-2.0, 2.0);
            const cplx c = oracle::multitime_correlator(tb.ops(), pm, {t1, t2}, nu).value;
            const bath::Kappa k = bath::kappa(cfg.baths[0].spec, t1 - t2 + nu);
            worst = std::max(worst, std::abs(c - cplx{k.r, k.i}));
        }
        d << "max residual " << worst << " (< 1e-7), leakage " << tb.leakage() << " (< 1e-6)";
        return worst < 1e-7 && tb.leakage() < 1e-6;
    });

    criterion(4, "first moment of heat", 60.0, [](std::ostringstream& d) {
        const RunConfig cfg = pinned();
        const auto baths = truncated_baths(cfg);
        const auto ev = make_evolver(cfg, baths);
        const cplx fd = richardson_first_moment(
            [&](double nu) { return ev.generating_function(cfg.rho0, cfg.counted_bath, nu, cfg.grid.t_i, cfg.grid.t_f); },
            1e-4);
        const double heat = ev.heat_change(cfg.rho0, cfg.counted_bath, cfg.grid.t_i, cfg.grid.t_f);
        const double rel = std::abs(fd - heat) / std::abs(heat);
        d << "finite difference " << fd.real() << ", heat change " << heat << ", relative " << rel << " (< 1e-5)";
        return rel < 1e-5;
    });

    criterion(5, "Wick suite", 60.0, [](std::ostringstream& d) {
        const RunConfig cfg = pinned();
        const oracle::TruncatedBath tb = tight_bath(cfg.baths[0].spec, 0.0);
        Sampler s{std::mt19937_64(202)};
        double g3 = 0.0;
        double g4 = 0.0;
        double rec = 0.0;
        for (int j = 0; j < 20; ++j) {
            const double nu = s.uniform(-1.0, 1.0);
            g3 = std::max(g3, std::abs(oracle::cumulant(tb.ops(), s.branches(3), s.times(3, 0.0, 3.0), nu).value));
            const auto b4 = s.branches(4);
            const auto t4 = s.times(4, 0.0, 3.0);
            g4 = std::max(g4, std::abs(oracle::cumulant(tb.ops(), b4, t4, nu).value));
            const cplx full = oracle::multitime_correlator(tb.ops(), b4, t4, nu).value;
            rec = std::max(rec, std::abs(full - oracle::wick_reconstruct(oracle::oracle_pair_source(tb.ops(), nu), b4, t4)));
        }
        d << "|G3| " << g3 << " (< 1e-8), |G4| " << g4 << " (< 1e-7), reconstruct " << rec << " (< 1e-7)";
        return g3 < 1e-8 && g4 < 1e-7 && rec < 1e-7;
    });

    criterion(6, "anharmonic activation", 0.0, [](std::ostringstream& d) {
        RunConfig cfg = pinned_kerr();
        const auto baths = truncated_baths(cfg);
        Sampler s{std::mt19937_64(303)};
        double g4 = 0.0;
        for (int j = 0; j < 20; ++j) {
            const auto t = s.times(4, 0.0, 4.0);
            g4 = std::max(g4, std::abs(oracle::cumulant(baths[0].ops(), s.branches(4), t, s.uniform(-1.0, 1.0)).value));
        }
        const DenseOp rho4 = path_density(cfg, baths);
        cfg.order = 2;
        const DenseOp rho2 = path_density(cfg, baths);
        cfg.gauss_order = 2 * cfg.gauss_order;
        const DenseOp rho2_fine = path_density(cfg, baths);
        const double engaged = max_abs(rho4 - rho2);
        const double quad = max_abs(rho2_fine - rho2);
        d << "max |G4| " << g4 << " (> 1e-4), |rho4-rho2| " << engaged << " vs quadrature error " << quad << " (x10)";
        return g4 > 1e-4 && engaged > 10.0 * quad;
    });

    criterion(7, "auxiliary identity sweep", 1.0, [](std::ostringstream& d) {
        Sampler s{std::mt19937_64(404)};
        double worst = 0.0;
        for (int j = 0; j < 100; ++j) {
            const double omega = s.uniform(0.2, 1.0);
            const double beta = s.uniform(0.2, 3.0);
            const double nu = (s.branch() == Branch::Plus ? 1.0 : -1.0) * s.uniform(0.01, 3.0);
            worst = std::max(worst, bath::check_aux_identities(omega, nu, beta).max());
        }
        d << "max residual " << worst << " (< 1e-8)";
        return worst < 1e-8;
    });

    criterion(8, "fourth-order sign table", 0.0, [](std::ostringstream& d) {
        const std::array<int, 8> expected{0, 0, 0, 0, 0, 0, 0, 8};
        bool ok = cumulants::derive_fourth_order_signs() == cumulants::kFourthOrderSigns;
        d << "row sums";
        for (std::size_t r = 0; r < 8; ++r) {
            int sum = 0;
            for (int v : cumulants::kFourthOrderSigns[r]) sum += v;
            d << ' ' << sum;
            ok = ok && sum == expected[r];
        }
        std::array<cplx, 8> ones;
        ones.fill(1.0);
        const auto a = cumulants::amplitudes4(ones);
        for (std::size_t r = 0; r < 8; ++r) ok = ok && a.a[r] == cplx{static_cast<double>(expected[r])};
        for (std::size_t k = 0; k < 8; ++k) {
            std::array<cplx, 8> e{};
            e[k] = 1.0;
            const auto col = cumulants::amplitudes4(e);
            for (std::size_t r = 0; r < 8; ++r)
                ok = ok && col.a[r] == cplx{static_cast<double>(cumulants::kFourthOrderSigns[r][k])};
        }
        const auto a3 = cumulants::amplitudes3(cumulants::OrderedTraces3{1.0, 2.0, 4.0, 8.0});
        ok = ok && a3.a == cplx{3.0} && a3.b == cplx{-9.0} && a3.c == cplx{-5.0} && a3.d == cplx{15.0};
        const auto a2 = cumulants::amplitudes2(cumulants::OrderedTraces2{cplx{1.0, 2.0}, cplx{0.5, -1.0}});
        ok = ok && a2.a_prime == cplx{0.5, 3.0} && a2.b_prime == cplx{1.5, 1.0};
        d << ", synthetic amplitudes " << (ok ? "exact" : "mismatch");
        return ok;
    });

    criterion(9, "largest-time label", 0.0, [](std::ostringstream& d) {
        const RunConfig cfg = pinned_kerr();
        const oracle::TruncatedBath tb = tight_bath(cfg.baths[0].spec, cfg.baths[0].kerr);
        Sampler s{std::mt19937_64(505)};
        double worst = 0.0;
        for (int j = 0; j < 10; ++j) {
            for (std::size_t n : {3u, 4u}) {
                auto b = s.branches(n);
                const auto t = s.times(n, 0.0, 3.0);
                const auto k = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
                const cplx before = oracle::multitime_correlator(tb.ops(), b, t, 0.0).value;
                b[k] = b[k] == Branch::Plus ? Branch::Minus : Branch::Plus;
                worst = std::max(worst, std::abs(before - oracle::multitime_correlator(tb.ops(), b, t, 0.0).value));
            }
        }
        d << "max change " << worst << " (< 1e-9)";
        return worst < 1e-9;
    });

    criterion(10, "determinism", 0.0, [](std::ostringstream& d) {
        const fs::path root = fs::temp_directory_path() / "fvheat_acceptance";
        fs::remove_all(root);
        std::string files[2];
        for (int j = 0; j < 2; ++j) {
            const fs::path dir = root / std::to_string(j);
            const std::string cmd = std::string("\"") + kBinary + "\" verify --config \"" +
                                    (kConfigs / "spinboson_weak.cfg").string() + "\" --out \"" + dir.string() +
                                    "\" > /dev/null 2>&1";
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                d << "verify run " << j << " returned " << rc;
                return false;
            }
            files[j] = slurp(dir / "verify.json");
        }
        const bool same = !files[0].empty() && files[0] == files[1];
        d << "verify.json " << files[0].size() << " bytes, " << (same ? "identical" : "different");
        return same;
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
