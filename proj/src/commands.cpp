// commands.cpp: kernels, evolve, heatgf and verify

#include "fvheat/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "fvheat/cumulants.hpp"
#include "fvheat/errors.hpp"
#include "fvheat/format.hpp"

namespace fvheat::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

nlohmann::json parameters_json(const RunConfig& cfg) {
    nlohmann::json p;
    p["config"] = cfg.source.filename().string();
    p["system_dim"] = cfg.system.dim();
    p["grid"] = {{"t_i", cfg.grid.t_i}, {"t_f", cfg.grid.t_f}, {"n_slices", cfg.grid.n_slices}};
    p["nu"] = cfg.nu;
    p["order"] = cfg.order;
    p["gauss_order"] = cfg.gauss_order;
    p["counted_bath"] = cfg.counted_bath;
    p["budget"] = cfg.budget;
    p["counter_term"] = cfg.counter_term;
    nlohmann::json baths = nlohmann::json::array();
    for (const auto& b : cfg.baths) {
        nlohmann::json modes = nlohmann::json::array();
        for (const auto& m : b.spec.modes)
            modes.push_back({{"omega", m.omega}, {"mass", m.mass}, {"coupling", m.coupling}});
        nlohmann::json jb{{"beta", b.spec.beta}, {"kerr", b.kerr}, {"modes", modes}};
        if (b.spec.ramp)
            jb["ramp"] = {{"t_on", b.spec.ramp->t_on}, {"t_off", b.spec.ramp->t_off}, {"width", b.spec.ramp->width}};
        baths.push_back(jb);
    }
    p["baths"] = baths;
    return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

double max_abs(const DenseOp& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

constexpr double kPathMomentStep = 1e-3;
constexpr double kOracleMomentStep = 1e-4;

}  // namespace

// ---------------------------------------------------------------- engines

std::vector<oracle::TruncatedBath> truncated_baths(const RunConfig& cfg) {
    std::vector<oracle::TruncatedBath> out;
    for (const auto& b : cfg.baths) {
        oracle::TruncationPolicy policy;
        policy.leakage_tol = cfg.oracle.leakage;
        policy.n_fock = b.n_fock;
        out.emplace_back(b.spec, b.kerr, policy);
    }
    return out;
}

bath::KernelSource kernel_source(const BathConfig& b, const oracle::TruncatedBath& tb) {
    return b.kerr == 0.0 ? bath::harmonic_kernel(b.spec) : tb.exact_kernel();
}

std::vector<influence::BathInfluence> bath_influences(const RunConfig& cfg,
                                                      const std::vector<oracle::TruncatedBath>& baths, double nu,
                                                      influence::Mode mode, std::vector<std::string>* notes) {
    std::vector<influence::BathInfluence> out;
    for (std::size_t j = 0; j < cfg.baths.size(); ++j) {
        const bool counted = j == cfg.counted_bath;
        influence::BathInfluence bi;
        bi.counted = counted;
        bi.coeffs = influence::discretize_action(kernel_source(cfg.baths[j], baths[j]), cfg.grid,
                                                 counted ? nu : 0.0, cfg.gauss_order);
        if (cfg.order > 2) {
            if (mode == influence::Mode::GeneratingFunction && counted) {
                if (notes && !baths[j].is_harmonic())
                    notes->push_back("counted bath " + std::to_string(j) +
                                     ": higher-order kernels carry no counting shift; generating function uses order 2");
            } else {
                const auto& ops = baths[j].ops();
                bi.higher = influence::build_higher_order_kernels(oracle::trace_source3(ops),
                                                                  oracle::cumulant4_source(ops), cfg.grid, cfg.order,
                                                                  cfg.baths[j].spec.ramp);
            }
        }
        out.push_back(std::move(bi));
    }
    return out;
}

bool path_sum_enabled(const RunConfig& cfg) { return cfg.budget > 0.0; }

DenseOp path_density(const RunConfig& cfg, const std::vector<oracle::TruncatedBath>& baths) {
    influence::PathSumOptions opts;
    opts.budget = cfg.budget;
    const auto infl = bath_influences(cfg, baths, 0.0, influence::Mode::Density);
    return influence::path_sum(cfg.system, infl, cfg.rho0, influence::Mode::Density, opts).density;
}

cplx path_generating_function(const RunConfig& cfg, const std::vector<oracle::TruncatedBath>& baths, double nu) {
    influence::PathSumOptions opts;
    opts.budget = cfg.budget;
    const auto infl = bath_influences(cfg, baths, nu, influence::Mode::GeneratingFunction);
    return influence::path_sum(cfg.system, infl, cfg.rho0, influence::Mode::GeneratingFunction, opts).gf;
}

oracle::ExactEvolver make_evolver(const RunConfig& cfg, const std::vector<oracle::TruncatedBath>& baths) {
    oracle::OracleSettings settings;
    settings.max_dim = cfg.oracle.max_dim;
    settings.n_steps = cfg.oracle.n_steps;
    return oracle::ExactEvolver(cfg.system, baths, settings);
}

// ---------------------------------------------------------------- kernels

int cmd_kernels(const RunConfig& cfg, std::ostream& out) {
    const auto t0 = Clock::now();
    std::vector<oracle::TruncatedBath> trunc;
    const bool any_kerr = std::any_of(cfg.baths.begin(), cfg.baths.end(), [](const BathConfig& b) { return b.kerr != 0.0; });
    if (any_kerr) trunc = truncated_baths(cfg);

    ResultRecord rec = make_record("kernels");
    rec.parameters = parameters_json(cfg);
    rec.parameters["tau_max"] = cfg.kernels.tau_max;
    rec.parameters["n_samples"] = cfg.kernels.n_samples;
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t b = 0; b < cfg.baths.size(); ++b) {
        for (std::size_t j = 0; j < cfg.nu.size(); ++j) {
            bath::KernelTable table;
            if (cfg.baths[b].kerr == 0.0) {
                table = bath::build_kernel_table(cfg.baths[b].spec, cfg.kernels.tau_max, cfg.kernels.n_samples, cfg.nu[j]);
            } else {
                table = bath::build_kernel_table(trunc[b].exact_kernel().stationary, cfg.kernels.tau_max,
                                                 cfg.kernels.n_samples, cfg.nu[j]);
            }
            const std::string name = "kernels_bath" + std::to_string(b) + "_nu" + std::to_string(j) + ".csv";
            std::ostringstream csv;
            bath::write_kernel_csv(csv, table);
            write_text(cfg.output / name, csv.str());
            files.push_back({{"bath", b}, {"nu", cfg.nu[j]}, {"file", name}});
            out << "wrote " << (cfg.output / name).string() << '\n';
        }
    }
    rec.values["files"] = files;
    rec.wall_time = seconds_since(t0);
    write_record(cfg.output / "kernels.json", rec);
    return kOk;
}

// ---------------------------------------------------------------- evolve

int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto t0 = Clock::now();
    const auto baths = truncated_baths(cfg);
    ResultRecord rec = make_record("density");
    rec.parameters = parameters_json(cfg);
    rec.tolerances["engine_tol"] = cfg.verify.engine_tol;

    const auto evolver = make_evolver(cfg, baths);
    const DenseOp rho_oracle = evolver.reduced_density(cfg.rho0, cfg.grid.t_i, cfg.grid.t_f);
    rec.values["oracle"] = {{"rho", matrix_json(rho_oracle)}, {"hilbert_dim", evolver.total_dim()}};
    out << "oracle: total dimension " << evolver.total_dim() << '\n';

    if (path_sum_enabled(cfg)) {
        const DenseOp rho_path = path_density(cfg, baths);
        const double diff = max_abs(rho_path - rho_oracle);
        rec.values["path_sum"] = {{"rho", matrix_json(rho_path)},
                                  {"path_pairs", influence::path_pair_count(cfg.system.dim(), cfg.grid.n_slices)}};
        rec.values["max_abs_difference"] = diff;
        out << "path sum vs oracle: max |diff| = " << diff << '\n';
    } else {
        err << "warning: path budget is 0; oracle only, comparison skipped\n";
        rec.values["comparison"] = "skipped: path budget is 0";
    }
    rec.wall_time = seconds_since(t0);
    write_record(cfg.output / "evolve.json", rec);
    return kOk;
}

// ---------------------------------------------------------------- heatgf

int cmd_heatgf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto t0 = Clock::now();
    const auto baths = truncated_baths(cfg);
    const auto evolver = make_evolver(cfg, baths);
    const bool with_path = path_sum_enabled(cfg);
    if (!with_path) err << "warning: path budget is 0; oracle only, comparison skipped\n";

    ResultRecord rec = make_record("gf");
    rec.parameters = parameters_json(cfg);
    rec.tolerances["first_moment_rel_tol"] = cfg.verify.first_moment_rel_tol;

    std::vector<std::string> notes;
    if (with_path && cfg.order > 2) bath_influences(cfg, baths, 0.0, influence::Mode::GeneratingFunction, &notes);

    std::ostringstream csv;
    std::ostringstream csv_oracle;
    csv << "nu,re_G,im_G\n";
    csv_oracle << "nu,re_G,im_G\n";
    nlohmann::json rows = nlohmann::json::array();
    for (double nu : cfg.nu) {
        const cplx g_oracle = evolver.generating_function(cfg.rho0, cfg.counted_bath, nu, cfg.grid.t_i, cfg.grid.t_f);
        nlohmann::json row{{"nu", nu}, {"oracle", complex_json(g_oracle)}};
        csv_oracle << format_double(nu) << ',' << format_double(g_oracle.real()) << ',' << format_double(g_oracle.imag())
                   << '\n';
        if (with_path) {
            const cplx g = path_generating_function(cfg, baths, nu);
            row["path_sum"] = complex_json(g);
            row["abs_difference"] = std::abs(g - g_oracle);
            csv << format_double(nu) << ',' << format_double(g.real()) << ',' << format_double(g.imag()) << '\n';
        }
        rows.push_back(row);
    }
    rec.values["G"] = rows;

    const cplx fm = evolver.first_moment(cfg.rho0, cfg.counted_bath, cfg.grid.t_i, cfg.grid.t_f, kOracleMomentStep);
    const double heat = evolver.heat_change(cfg.rho0, cfg.counted_bath, cfg.grid.t_i, cfg.grid.t_f);
    const double rel = std::abs(fm - heat) / std::max(std::abs(heat), 1e-300);
    nlohmann::json moment{{"oracle_finite_difference", complex_json(fm)},
                          {"oracle_heat_change", heat},
                          {"relative_difference", rel},
                          {"step", kOracleMomentStep}};
    if (with_path) {
        const cplx fm_path = richardson_first_moment(
            [&](double nu) { return path_generating_function(cfg, baths, nu); }, kPathMomentStep);
        moment["path_sum_finite_difference"] = complex_json(fm_path);
        moment["path_sum_step"] = kPathMomentStep;
    }
    rec.values["first_moment"] = moment;
    if (!notes.empty()) rec.values["notes"] = notes;
    out << "first moment: finite difference " << fm.real() << ", oracle heat change " << heat << ", relative difference "
        << rel << '\n';

    write_text(cfg.output / "heatgf_oracle.csv", csv_oracle.str());
    if (with_path) write_text(cfg.output / "heatgf.csv", csv.str());
    rec.wall_time = seconds_since(t0);
    write_record(cfg.output / "heatgf.json", rec);
    out << "wrote " << (cfg.output / "heatgf.json").string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- verify

namespace {

struct Sampler {
    std::mt19937_64 rng;
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    Branch branch() { return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? Branch::Plus : Branch::Minus; }
    cumulants::Times times(std::size_t n, double a, double b) {
        cumulants::Times t;
        for (std::size_t j = 0; j < n; ++j) t.push_back(uniform(a, b));
        return t;
    }
    cumulants::Branches branches(std::size_t n) {
        cumulants::Branches out;
        for (std::size_t j = 0; j < n; ++j) out.push_back(branch());
        return out;
    }
};

CheckResult bound(std::string name, double residual, double tol, std::string note = {}) {
    return {std::move(name), residual < tol, false, residual, tol, std::move(note)};
}

CheckResult skipped(std::string name, std::string note) { return {std::move(name), true, true, 0.0, 0.0, std::move(note)}; }

void bath_checks(const RunConfig& cfg, std::size_t b, const oracle::TruncatedBath& tb, Sampler& s,
                 std::vector<CheckResult>& out) {
    const std::string tag = "[" + std::to_string(b) + "]";
    const auto& ops = tb.ops();
    const double lo = cfg.grid.t_i;
    const double hi = cfg.grid.t_f;
    const auto n = static_cast<std::size_t>(cfg.verify.samples);
    const auto stationary = kernel_source(cfg.baths[b], tb).stationary;

    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t1 = s.uniform(lo, hi);
        const double t2 = s.uniform(lo, hi);
        const double nu = s.uniform(-1.0, 1.0);
        const cplx c = oracle::multitime_correlator(ops, {Branch::Plus, Branch::Minus}, {t1, t2}, nu).value;
        const bath::Kappa k = stationary(t1 - t2 + nu);
        shift = std::max(shift, std::abs(c - cplx{k.r, k.i}));
    }
    out.push_back(bound("time_shift_kernel" + tag, shift, cfg.verify.shift_tol));

    if (tb.is_harmonic()) {
        double g3 = 0.0;
        double g4 = 0.0;
        double rec = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double nu = s.uniform(-1.0, 1.0);
            const auto b3 = s.branches(3);
            const auto t3 = s.times(3, lo, hi);
            g3 = std::max(g3, std::abs(oracle::cumulant(ops, b3, t3, nu).value));
            const auto b4 = s.branches(4);
            const auto t4 = s.times(4, lo, hi);
            g4 = std::max(g4, std::abs(oracle::cumulant(ops, b4, t4, nu).value));
            const auto pairs_nu = oracle::oracle_pair_source(ops, nu);
            const cplx full = oracle::multitime_correlator(ops, b4, t4, nu).value;
            rec = std::max(rec, std::abs(full - oracle::wick_reconstruct(pairs_nu, b4, t4)));
        }
        out.push_back(bound("wick_g3" + tag, g3, cfg.verify.wick3_tol));
        out.push_back(bound("wick_g4" + tag, g4, cfg.verify.wick4_tol));
        out.push_back(bound("wick_reconstruct" + tag, rec, cfg.verify.reconstruct_tol));
    } else {
        const std::string note = "an-harmonic bath: higher cumulants are expected to be nonzero";
        out.push_back(skipped("wick_g3" + tag, note));
        out.push_back(skipped("wick_g4" + tag, note));
        out.push_back(skipped("wick_reconstruct" + tag, note));
    }

    double round_trip = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double nu = s.uniform(-1.0, 1.0);
        for (std::size_t order = 2; order <= 4; ++order) {
            const auto br = s.branches(order);
            const auto t = s.times(order, lo, hi);
            const auto cum = [&ops, nu](const cumulants::Branches& bb, const cumulants::Times& tt) {
                return oracle::cumulant(ops, bb, tt, nu).value;
            };
            const cplx direct = oracle::multitime_correlator(ops, br, t, nu).value;
            round_trip = std::max(round_trip, std::abs(direct - cumulants::grouping_reconstruct(cum, br, t)));
        }
    }
    out.push_back(bound("cumulant_round_trip" + tag, round_trip, cfg.verify.reconstruct_tol));

    double flip = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t order = 3; order <= 4; ++order) {
            auto br = s.branches(order);
            const auto t = s.times(order, lo, hi);
            const auto latest = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
            const cplx a = oracle::multitime_correlator(ops, br, t, 0.0).value;
            br[latest] = br[latest] == Branch::Plus ? Branch::Minus : Branch::Plus;
            const cplx c = oracle::multitime_correlator(ops, br, t, 0.0).value;
            flip = std::max(flip, std::abs(a - c));
        }
    }
    out.push_back(bound("largest_time_label" + tag, flip, cfg.verify.largest_time_tol));
}

}  // namespace

std::vector<CheckResult> run_checks(const RunConfig& cfg) {
    std::vector<CheckResult> out;
    Sampler s{std::mt19937_64(cfg.verify.seed)};

    try {
        cumulants::check_fourth_order_signs();
        out.push_back(bound("fourth_order_signs", 0.0, 0.5));
    } catch (const std::logic_error& e) {
        out.push_back({"fourth_order_signs", false, false, 1.0, 0.5, e.what()});
    }

    double aux = 0.0;
    for (int j = 0; j < 100; ++j) {
        const double omega = s.uniform(0.2, 1.0);
        const double beta = s.uniform(0.2, 3.0);
        const double nu = (s.branch() == Branch::Plus ? 1.0 : -1.0) * s.uniform(0.01, 3.0);
        aux = std::max(aux, bath::check_aux_identities(omega, nu, beta).max());
    }
    out.push_back(bound("aux_identities", aux, cfg.verify.identity_tol));

    std::vector<oracle::TruncatedBath> baths;
    try {
        baths = truncated_baths(cfg);
    } catch (const LeakageError& e) {
        out.push_back({"fock_leakage", false, false, 0.0, cfg.oracle.leakage, e.what()});
        return out;
    }
    double leak = 0.0;
    for (const auto& tb : baths) leak = std::max(leak, tb.leakage());
    out.push_back(bound("fock_leakage", leak, cfg.oracle.leakage));

    for (std::size_t b = 0; b < baths.size(); ++b) bath_checks(cfg, b, baths[b], s, out);

    const auto evolver = make_evolver(cfg, baths);
    const double t_i = cfg.grid.t_i;
    const double t_f = cfg.grid.t_f;
    const cplx g0 = evolver.generating_function(cfg.rho0, cfg.counted_bath, 0.0, t_i, t_f);
    out.push_back(bound("oracle_gf_unit", std::abs(g0 - 1.0), cfg.verify.unit_tol));

    double conj = 0.0;
    for (double nu : cfg.nu) {
        const cplx gp = evolver.generating_function(cfg.rho0, cfg.counted_bath, nu, t_i, t_f);
        const cplx gm = evolver.generating_function(cfg.rho0, cfg.counted_bath, -nu, t_i, t_f);
        conj = std::max(conj, std::abs(gm - std::conj(gp)));
    }
    out.push_back(bound("oracle_gf_conjugate", conj, cfg.verify.unit_tol));

    const cplx fm = evolver.first_moment(cfg.rho0, cfg.counted_bath, t_i, t_f, kOracleMomentStep);
    const double heat = evolver.heat_change(cfg.rho0, cfg.counted_bath, t_i, t_f);
    out.push_back(bound("first_moment", std::abs(fm - heat) / std::max(std::abs(heat), 1e-300),
                        cfg.verify.first_moment_rel_tol, "relative to the oracle heat change"));

    if (!path_sum_enabled(cfg)) {
        const std::string note = "path budget is 0; oracle only";
        for (const char* name : {"nu0_collapse", "engine_density", "engine_gf", "path_hermiticity"})
            out.push_back(skipped(name, note));
        return out;
    }

    const DenseOp rho_oracle = evolver.reduced_density(cfg.rho0, t_i, t_f);
    const DenseOp rho_path = path_density(cfg, baths);
    const cplx g_path0 = path_generating_function(cfg, baths, 0.0);
    out.push_back(bound("nu0_collapse", std::abs(g_path0 - rho_path.trace()), cfg.verify.collapse_tol));
    out.push_back(bound("engine_density", max_abs(rho_path - rho_oracle), cfg.verify.engine_tol));

    std::vector<std::string> notes;
    if (cfg.order > 2) bath_influences(cfg, baths, 0.0, influence::Mode::GeneratingFunction, &notes);
    double gf = 0.0;
    for (double nu : cfg.nu) {
        const cplx a = path_generating_function(cfg, baths, nu);
        const cplx b = evolver.generating_function(cfg.rho0, cfg.counted_bath, nu, t_i, t_f);
        gf = std::max(gf, std::abs(a - b));
    }
    std::string gf_note;
    for (const auto& n : notes) gf_note += (gf_note.empty() ? "" : "; ") + n;
    out.push_back(bound("engine_gf", gf, cfg.verify.gf_tol, gf_note));
    out.push_back(bound("path_hermiticity", max_abs(rho_path - rho_path.adjoint()), cfg.verify.hermiticity_tol));
    return out;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto checks = run_checks(cfg);
    ResultRecord rec = make_record("verify");
    rec.parameters = parameters_json(cfg);
    rec.parameters["seed"] = cfg.verify.seed;
    rec.parameters["samples"] = cfg.verify.samples;
    nlohmann::json rows = nlohmann::json::array();
    bool ok = true;
    out << std::left << std::setw(28) << "check" << std::setw(8) << "status" << std::setw(14) << "residual"
        << std::setw(12) << "tolerance" << "note\n";
    for (const auto& c : checks) {
        ok = ok && c.passed;
        const char* status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
        std::ostringstream res;
        std::ostringstream tol;
        res << std::setprecision(3) << std::scientific << c.residual;
        tol << std::setprecision(1) << std::scientific << c.tolerance;
        out << std::left << std::setw(28) << c.name << std::setw(8) << status << std::setw(14)
            << (c.skipped ? "-" : res.str()) << std::setw(12) << (c.skipped ? "-" : tol.str()) << c.note << '\n';
        nlohmann::json row{{"name", c.name}, {"status", status}};
        if (!c.skipped) {
            row["residual"] = c.residual;
            row["tolerance"] = c.tolerance;
        }
        if (!c.note.empty()) row["note"] = c.note;
        rows.push_back(row);
        rec.tolerances[c.name] = c.tolerance;
    }
    rec.values["checks"] = rows;
    rec.values["passed"] = ok;
    write_record(cfg.output / "verify.json", rec);
    out << (ok ? "all checks passed" : "verification FAILED") << '\n';
    return ok ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------- entry point

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Influence-functional dynamics and heat statistics with exact cross-checks", "fvheat"};
    app.require_subcommand(1);
    std::filesystem::path config;
    std::optional<std::string> out_dir;
    std::optional<double> budget;
    std::optional<int> order;
    std::string command;
    for (const char* name : {"kernels", "evolve", "heatgf", "verify"}) {
        const char* help = std::string(name) == "kernels"  ? "Export kernel tables as CSV"
                           : std::string(name) == "evolve" ? "Reduced density from both engines"
                           : std::string(name) == "heatgf" ? "Heat generating function from both engines"
                                                           : "Run the invariant suite";
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "YAML run configuration")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--budget", budget, "Maximum number of path pairs (0: oracle only)")->check(CLI::NonNegativeNumber);
        sub->add_option("--order", order, "Cumulant truncation order")->check(CLI::IsMember({2, 3, 4}));
        sub->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kConfigError;
    }

    RunConfig cfg;
    try {
        cfg = parse_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    if (out_dir) cfg.output = *out_dir;
    if (budget) cfg.budget = *budget;
    if (order) cfg.order = *order;

    try {
        if (command == "kernels") return cmd_kernels(cfg, out);
        if (command == "evolve") return cmd_evolve(cfg, out, err);
        if (command == "heatgf") return cmd_heatgf(cfg, out, err);
        return cmd_verify(cfg, out, err);
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kBudgetExceeded;
    } catch (const LeakageError& e) {
        err << "leakage: " << e.what() << '\n';
        return kVerifyFailed;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
}

}  // namespace fvheat::cli
