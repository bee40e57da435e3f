// config.cpp: YAML parsing with line-and-field diagnostics

#include "fvheat/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fvheat::cli {

namespace {

class Reader {
public:
    explicit Reader(std::filesystem::path source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
        std::ostringstream msg;
        msg << source_.string();
        if (node.IsDefined() && node.Mark().line >= 0)
            msg << ':' << node.Mark().line + 1 << ':' << node.Mark().column + 1;
        msg << ": " << field << ": " << what;
        throw ConfigError(msg.str());
    }

    YAML::Node required(const YAML::Node& parent, const std::string& key, const std::string& path) const {
        const YAML::Node n = parent[key];
        if (!n.IsDefined() || n.IsNull()) fail(parent, join(path, key), "missing");
        return n;
    }

    double number(const YAML::Node& n, const std::string& field) const {
        if (!n.IsScalar()) fail(n, field, "expected a number");
        try {
            const double v = n.as<double>();
            if (!std::isfinite(v)) fail(n, field, "not finite");
            return v;
        } catch (const YAML::BadConversion&) {
            fail(n, field, "expected a number, got '" + n.Scalar() + "'");
        }
    }

    long integer(const YAML::Node& n, const std::string& field) const {
        const double v = number(n, field);
        if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(n, field, "expected an integer");
        return static_cast<long>(v);
    }

    bool boolean(const YAML::Node& n, const std::string& field) const {
        try {
            return n.as<bool>();
        } catch (const YAML::BadConversion&) {
            fail(n, field, "expected true or false");
        }
    }

    double number_or(const YAML::Node& parent, const std::string& key, const std::string& path, double fallback) const {
        const YAML::Node n = parent[key];
        return n.IsDefined() && !n.IsNull() ? number(n, join(path, key)) : fallback;
    }

    long integer_or(const YAML::Node& parent, const std::string& key, const std::string& path, long fallback) const {
        const YAML::Node n = parent[key];
        return n.IsDefined() && !n.IsNull() ? integer(n, join(path, key)) : fallback;
    }

    cplx complex_entry(const YAML::Node& n, const std::string& field) const {
        if (n.IsSequence()) {
            if (n.size() != 2) fail(n, field, "complex entries are [re, im]");
            return {number(n[0], field), number(n[1], field)};
        }
        return {number(n, field), 0.0};
    }

    // Row-major flattened dim × dim matrix.
    DenseOp matrix(const YAML::Node& n, long dim, const std::string& field) const {
        if (!n.IsSequence()) fail(n, field, "expected a row-major list of entries");
        if (static_cast<long>(n.size()) != dim * dim)
            fail(n, field, "expected " + std::to_string(dim * dim) + " entries, got " + std::to_string(n.size()));
        DenseOp m(dim, dim);
        for (long r = 0; r < dim; ++r)
            for (long c = 0; c < dim; ++c)
                m(r, c) = complex_entry(n[static_cast<std::size_t>(r * dim + c)],
                                        field + "[" + std::to_string(r * dim + c) + "]");
        return m;
    }

    std::vector<double> numbers(const YAML::Node& n, const std::string& field) const {
        if (!n.IsSequence()) fail(n, field, "expected a list");
        std::vector<double> out;
        for (std::size_t j = 0; j < n.size(); ++j) out.push_back(number(n[j], field + "[" + std::to_string(j) + "]"));
        return out;
    }

    void only_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> keys) const {
        if (!n.IsMap()) fail(n, path.empty() ? "<root>" : path, "expected a mapping");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, join(path, key), "unknown key");
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    std::filesystem::path source_;
};

BathConfig parse_bath(const Reader& rd, const YAML::Node& n, const std::string& path) {
    rd.only_keys(n, path, {"beta", "kerr", "modes", "ramp", "n_fock"});
    BathConfig b;
    const YAML::Node beta = rd.required(n, "beta", path);
    b.spec.beta = rd.number(beta, path + ".beta");
    if (!(b.spec.beta > 0.0)) rd.fail(beta, path + ".beta", "must be > 0");
    b.kerr = rd.number_or(n, "kerr", path, 0.0);
    if (b.kerr < 0.0) rd.fail(n["kerr"], path + ".kerr", "must be >= 0");

    const YAML::Node modes = rd.required(n, "modes", path);
    if (!modes.IsSequence() || modes.size() == 0) rd.fail(modes, path + ".modes", "expected a non-empty list");
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const std::string mp = path + ".modes[" + std::to_string(j) + "]";
        const YAML::Node m = modes[j];
        rd.only_keys(m, mp, {"omega", "mass", "coupling"});
        bath::Mode mode;
        mode.omega = rd.number(rd.required(m, "omega", mp), mp + ".omega");
        mode.mass = rd.number_or(m, "mass", mp, 1.0);
        mode.coupling = rd.number(rd.required(m, "coupling", mp), mp + ".coupling");
        if (!(mode.omega > 0.0)) rd.fail(m["omega"], mp + ".omega", "must be > 0");
        if (!(mode.mass > 0.0)) rd.fail(m["mass"], mp + ".mass", "must be > 0");
        b.spec.modes.push_back(mode);
    }

    if (const YAML::Node r = n["ramp"]; r.IsDefined() && !r.IsNull()) {
        const std::string rp = path + ".ramp";
        rd.only_keys(r, rp, {"t_on", "t_off", "width"});
        bath::Ramp ramp;
        ramp.t_on = rd.number(rd.required(r, "t_on", rp), rp + ".t_on");
        ramp.t_off = rd.number(rd.required(r, "t_off", rp), rp + ".t_off");
        ramp.width = rd.number_or(r, "width", rp, 0.0);
        b.spec.ramp = ramp;
    }
    if (const YAML::Node f = n["n_fock"]; f.IsDefined() && !f.IsNull()) {
        if (!f.IsSequence() || f.size() != b.spec.modes.size())
            rd.fail(f, path + ".n_fock", "expected one level count per mode");
        std::vector<int> levels;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const long v = rd.integer(f[j], path + ".n_fock[" + std::to_string(j) + "]");
            if (v < 2 || v > 4096) rd.fail(f[j], path + ".n_fock[" + std::to_string(j) + "]", "must be in [2, 4096]");
            levels.push_back(static_cast<int>(v));
        }
        b.n_fock = levels;
    }
    try {
        b.spec.validate();
    } catch (const std::invalid_argument& e) {
        rd.fail(n, path, e.what());
    }
    return b;
}

RunConfig parse_root(const YAML::Node& root, const std::filesystem::path& source) {
    const Reader rd(source);
    rd.only_keys(root, "", {"system", "baths", "counted_bath", "grid", "nu", "order", "gauss_order", "oracle",
                            "kernels", "output", "budget", "verify"});
    RunConfig cfg;
    cfg.source = source;

    const YAML::Node sys = rd.required(root, "system", "");
    rd.only_keys(sys, "system", {"dim", "h_s", "x_s", "rho0", "counter_term"});
    const YAML::Node dim_node = rd.required(sys, "dim", "system");
    const long dim = rd.integer(dim_node, "system.dim");
    if (dim < 1 || dim > 64) rd.fail(dim_node, "system.dim", "must be in [1, 64]");
    const DenseOp h = rd.matrix(rd.required(sys, "h_s", "system"), dim, "system.h_s");
    const DenseOp x = rd.matrix(rd.required(sys, "x_s", "system"), dim, "system.x_s");
    cfg.rho0 = rd.matrix(rd.required(sys, "rho0", "system"), dim, "system.rho0");
    if (const YAML::Node ct = sys["counter_term"]; ct.IsDefined()) cfg.counter_term = rd.boolean(ct, "system.counter_term");
    try {
        cfg.system = SystemModel::make(h, x);
    } catch (const std::exception& e) {
        rd.fail(sys, "system", e.what());
    }
    try {
        validate_density(cfg.rho0, dim);
    } catch (const std::invalid_argument& e) {
        rd.fail(sys["rho0"], "system.rho0", e.what());
    }

    const YAML::Node baths = rd.required(root, "baths", "");
    if (!baths.IsSequence() || baths.size() == 0) rd.fail(baths, "baths", "expected a non-empty list");
    for (std::size_t j = 0; j < baths.size(); ++j)
        cfg.baths.push_back(parse_bath(rd, baths[j], "baths[" + std::to_string(j) + "]"));
    if (cfg.counter_term) {
        double mu = 0.0;
        for (const auto& b : cfg.baths) mu += b.spec.counter_term();
        cfg.system = cfg.system.with_counter_term(mu);
    }

    const long counted = rd.integer_or(root, "counted_bath", "", 0);
    if (counted < 0 || counted >= static_cast<long>(cfg.baths.size()))
        rd.fail(root["counted_bath"], "counted_bath", "index outside the bath list");
    cfg.counted_bath = static_cast<std::size_t>(counted);

    const YAML::Node grid = rd.required(root, "grid", "");
    rd.only_keys(grid, "grid", {"t_i", "t_f", "n_slices"});
    cfg.grid.t_i = rd.number_or(grid, "t_i", "grid", 0.0);
    cfg.grid.t_f = rd.number(rd.required(grid, "t_f", "grid"), "grid.t_f");
    cfg.grid.n_slices = static_cast<int>(rd.integer(rd.required(grid, "n_slices", "grid"), "grid.n_slices"));
    if (cfg.grid.n_slices < 1 || cfg.grid.n_slices > 64) rd.fail(grid["n_slices"], "grid.n_slices", "must be in [1, 64]");
    if (!(cfg.grid.t_f > cfg.grid.t_i)) rd.fail(grid["t_f"], "grid.t_f", "must exceed t_i");

    if (const YAML::Node nu = root["nu"]; nu.IsDefined() && !nu.IsNull()) {
        cfg.nu = rd.numbers(nu, "nu");
        if (cfg.nu.empty()) rd.fail(nu, "nu", "expected at least one value");
    }

    cfg.order = static_cast<int>(rd.integer_or(root, "order", "", 2));
    if (cfg.order < 2 || cfg.order > 4) rd.fail(root["order"], "order", "must be 2, 3 or 4");
    cfg.gauss_order = static_cast<int>(rd.integer_or(root, "gauss_order", "", 8));
    if (cfg.gauss_order < 1 || cfg.gauss_order > 64) rd.fail(root["gauss_order"], "gauss_order", "must be in [1, 64]");

    if (const YAML::Node o = root["oracle"]; o.IsDefined() && !o.IsNull()) {
        rd.only_keys(o, "oracle", {"leakage", "max_dim", "n_steps"});
        cfg.oracle.leakage = rd.number_or(o, "leakage", "oracle", cfg.oracle.leakage);
        cfg.oracle.max_dim = rd.integer_or(o, "max_dim", "oracle", cfg.oracle.max_dim);
        cfg.oracle.n_steps = static_cast<int>(rd.integer_or(o, "n_steps", "oracle", cfg.oracle.n_steps));
        if (!(cfg.oracle.leakage > 0.0 && cfg.oracle.leakage < 1.0)) rd.fail(o["leakage"], "oracle.leakage", "must be in (0, 1)");
        if (cfg.oracle.max_dim < 1) rd.fail(o["max_dim"], "oracle.max_dim", "must be >= 1");
        if (cfg.oracle.n_steps < 1) rd.fail(o["n_steps"], "oracle.n_steps", "must be >= 1");
    }

    if (const YAML::Node k = root["kernels"]; k.IsDefined() && !k.IsNull()) {
        rd.only_keys(k, "kernels", {"tau_max", "n_samples"});
        cfg.kernels.tau_max = rd.number_or(k, "tau_max", "kernels", cfg.kernels.tau_max);
        const long n = rd.integer_or(k, "n_samples", "kernels", static_cast<long>(cfg.kernels.n_samples));
        if (!(cfg.kernels.tau_max > 0.0)) rd.fail(k["tau_max"], "kernels.tau_max", "must be > 0");
        if (n < 2) rd.fail(k["n_samples"], "kernels.n_samples", "must be >= 2");
        cfg.kernels.n_samples = static_cast<std::size_t>(n);
    }

    if (const YAML::Node out = root["output"]; out.IsDefined() && !out.IsNull()) {
        if (!out.IsScalar()) rd.fail(out, "output", "expected a directory path");
        cfg.output = out.Scalar();
    }
    cfg.budget = rd.number_or(root, "budget", "", cfg.budget);
    if (cfg.budget < 0.0) rd.fail(root["budget"], "budget", "must be >= 0");

    if (const YAML::Node v = root["verify"]; v.IsDefined() && !v.IsNull()) {
        rd.only_keys(v, "verify", {"seed", "samples", "engine_tol", "gf_tol", "collapse_tol", "unit_tol", "shift_tol",
                                   "wick3_tol", "wick4_tol", "reconstruct_tol", "largest_time_tol", "identity_tol",
                                   "first_moment_rel_tol", "hermiticity_tol"});
        auto& vc = cfg.verify;
        const long seed = rd.integer_or(v, "seed", "verify", static_cast<long>(vc.seed));
        if (seed < 0) rd.fail(v["seed"], "verify.seed", "must be >= 0");
        vc.seed = static_cast<std::uint64_t>(seed);
        vc.samples = static_cast<int>(rd.integer_or(v, "samples", "verify", vc.samples));
        if (vc.samples < 1) rd.fail(v["samples"], "verify.samples", "must be >= 1");
        struct Tol {
            const char* key;
            double* value;
        };
        for (const Tol& t : {Tol{"engine_tol", &vc.engine_tol}, Tol{"gf_tol", &vc.gf_tol},
                             Tol{"collapse_tol", &vc.collapse_tol}, Tol{"unit_tol", &vc.unit_tol},
                             Tol{"shift_tol", &vc.shift_tol}, Tol{"wick3_tol", &vc.wick3_tol},
                             Tol{"wick4_tol", &vc.wick4_tol}, Tol{"reconstruct_tol", &vc.reconstruct_tol},
                             Tol{"largest_time_tol", &vc.largest_time_tol}, Tol{"identity_tol", &vc.identity_tol},
                             Tol{"first_moment_rel_tol", &vc.first_moment_rel_tol},
                             Tol{"hermiticity_tol", &vc.hermiticity_tol}}) {
            *t.value = rd.number_or(v, t.key, "verify", *t.value);
            if (!(*t.value > 0.0)) rd.fail(v[t.key], std::string("verify.") + t.key, "must be > 0");
        }
    }
    return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        std::ostringstream msg;
        msg << source.string() << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
        throw ConfigError(msg.str());
    }
    try {
        return parse_root(root, source);
    } catch (const YAML::Exception& e) {
        std::ostringstream msg;
        msg << source.string() << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
        throw ConfigError(msg.str());
    }
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace fvheat::cli
