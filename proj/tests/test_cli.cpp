#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fvheat/commands.hpp"
#include "fvheat/config.hpp"
#include "fvheat/records.hpp"

using namespace fvheat;
using namespace fvheat::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs{FVHEAT_CONFIG_DIR};

const char* kSmall = R"(system:
  dim: 2
  h_s: [0, 0.5, 0.5, 0]
  x_s: [1, 0, 0, -1]
  rho0: [1, 0, 0, 0]
baths:
  - beta: 2
    modes:
      - {omega: 1, mass: 1, coupling: 0.3}
grid: {t_i: 0, t_f: 1, n_slices: 4}
nu: [0, 0.5, -0.5]
oracle: {leakage: 1.0e-10}
kernels: {tau_max: 2, n_samples: 21}
)";

struct Run {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fvheat_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "fvheat");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

Run run_small(const std::string& command, const std::string& text, const fs::path& dir,
              std::vector<std::string> extra = {}) {
    const fs::path cfg = write_config(dir, text);
    std::vector<std::string> args{command, "--config", cfg.string(), "--out", dir.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("shipped configurations parse") {
    for (const char* name : {"spinboson_weak.cfg", "kerr_bath.cfg", "two_baths.cfg"}) {
        CAPTURE(name);
        const RunConfig cfg = parse_config(kConfigs / name);
        CHECK(cfg.grid.n_slices > 0);
        CHECK(!cfg.baths.empty());
        CHECK(cfg.nu.front() == 0.0);
    }
    const RunConfig k = parse_config(kConfigs / "kerr_bath.cfg");
    CHECK(k.baths[0].kerr != 0.0);
    CHECK(k.order == 4);
}

TEST_CASE("configuration errors name the field and the line") {
    SUBCASE("negative inverse temperature") {
        try {
            (void)parse_config_text(replace(kSmall, "beta: 2", "beta: -2"), "x.cfg");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string m = e.what();
            CHECK(m.find("baths[0]") != std::string::npos);
            CHECK(m.find("beta") != std::string::npos);
            CHECK(m.find("x.cfg:7") != std::string::npos);
        }
        const fs::path dir = scratch("beta");
        const Run r = run_small("evolve", replace(kSmall, "beta: 2", "beta: -2"), dir);
        CHECK(r.code == kConfigError);
        CHECK(r.err.find("beta") != std::string::npos);
    }
    SUBCASE("unknown key") {
        CHECK_THROWS_WITH_AS((void)parse_config_text(std::string(kSmall) + "colour: blue\n"),
                             doctest::Contains("colour"), ConfigError);
        CHECK_THROWS_AS((void)parse_config_text(replace(kSmall, "t_f: 1", "t_f: 1, tf: 2")), ConfigError);
    }
    SUBCASE("shape and type") {
        CHECK_THROWS_WITH_AS((void)parse_config_text(replace(kSmall, "x_s: [1, 0, 0, -1]", "x_s: [1, 0, 0]")),
                             doctest::Contains("system.x_s"), ConfigError);
        CHECK_THROWS_AS((void)parse_config_text(replace(kSmall, "n_slices: 4", "n_slices: four")), ConfigError);
        CHECK_THROWS_AS((void)parse_config_text(replace(kSmall, "rho0: [1, 0, 0, 0]", "rho0: [1, 0, 0, 1]")),
                        ConfigError);
        CHECK_THROWS_AS((void)parse_config_text("system: [1, 2\n"), ConfigError);
    }
    SUBCASE("complex entries and counter term") {
        const RunConfig cfg = parse_config_text(
            replace(replace(kSmall, "h_s: [0, 0.5, 0.5, 0]", "h_s: [0, [0, -0.5], [0, 0.5], 0]"), "rho0: [1, 0, 0, 0]",
                    "rho0: [1, 0, 0, 0]\n  counter_term: true"));
        CHECK(cfg.system.h_s(0, 1) == cplx{0.0, -0.5});
        CHECK(cfg.counter_term);
        CHECK(std::abs(cfg.system.h_s(0, 0) - 0.045) < 1e-15);
    }
    SUBCASE("missing file and bad flags") {
        CHECK(run({"evolve", "--config", "/nonexistent/run.cfg"}).code == kConfigError);
        CHECK(run({"evolve"}).code == kConfigError);
        CHECK(run({"evolve", "--config", (kConfigs / "spinboson_weak.cfg").string(), "--order", "5"}).code ==
              kConfigError);
    }
}

TEST_CASE("kernels command") {
    const fs::path dir = scratch("kernels");
    const Run r = run_small("kernels", kSmall, dir);
    REQUIRE(r.code == kOk);
    CHECK(fs::exists(dir / "kernels.json"));
    const auto plain = read_csv(dir / "kernels_bath0_nu0.csv");
    const auto shifted = read_csv(dir / "kernels_bath0_nu1.csv");
    REQUIRE(plain.size() == 21);
    REQUIRE(shifted.size() == 21);
    bool saw_zero = false;
    for (const auto& row : plain) {
        REQUIRE(row.size() == 7);
        // at zero shift the shifted columns are the plain kernel
        CHECK(row[3] == row[1]);
        CHECK(row[4] == row[2]);
        CHECK(row[5] == row[1]);
        CHECK(row[6] == -row[2]);
        if (row[0] == 0.0) {
            saw_zero = true;
            CHECK(row[2] == 0.0);
        }
    }
    CHECK(saw_zero);
    CHECK(shifted[10][3] != shifted[10][1]);
    const ResultRecord rec = read_record(dir / "kernels.json");
    CHECK(rec.kind == "kernels");
    CHECK(rec.values["files"].size() == 3);
}

TEST_CASE("evolve command") {
    SUBCASE("zero coupling: both engines give free evolution") {
        const fs::path dir = scratch("evolve_free");
        REQUIRE(run_small("evolve", replace(kSmall, "coupling: 0.3", "coupling: 0"), dir).code == kOk);
        const ResultRecord rec = read_record(dir / "evolve.json");
        CHECK(rec.kind == "density");
        CHECK(rec.values["max_abs_difference"].get<double>() < 1e-8);
    }
    SUBCASE("weak coupling agrees with the oracle") {
        const fs::path dir = scratch("evolve_weak");
        REQUIRE(run_small("evolve", kSmall, dir).code == kOk);
        CHECK(read_record(dir / "evolve.json").values["max_abs_difference"].get<double>() < 5e-3);
    }
    SUBCASE("budget zero runs the oracle alone") {
        const fs::path dir = scratch("evolve_oracle");
        const Run r = run_small("evolve", kSmall, dir, {"--budget", "0"});
        CHECK(r.code == kOk);
        CHECK(r.err.find("warning") != std::string::npos);
        const ResultRecord rec = read_record(dir / "evolve.json");
        CHECK(rec.values.contains("oracle"));
        CHECK_FALSE(rec.values.contains("path_sum"));
    }
    SUBCASE("budget and dimension limits") {
        const fs::path dir = scratch("evolve_limits");
        const Run small_budget = run_small("evolve", kSmall, dir, {"--budget", "100"});
        CHECK(small_budget.code == kBudgetExceeded);
        CHECK(small_budget.err.find("256") != std::string::npos);
        CHECK(run_small("evolve", replace(kSmall, "leakage: 1.0e-10", "leakage: 1.0e-10, max_dim: 8"), dir).code ==
              kBudgetExceeded);
    }
}

TEST_CASE("heatgf command") {
    const fs::path dir = scratch("heatgf");
    REQUIRE(run_small("heatgf", kSmall, dir).code == kOk);
    const auto path = read_csv(dir / "heatgf.csv");
    const auto oracle = read_csv(dir / "heatgf_oracle.csv");
    REQUIRE(path.size() == 3);
    REQUIRE(oracle.size() == 3);
    CHECK(std::abs(path[0][1] - 1.0) < 1e-8);
    CHECK(std::abs(path[0][2]) < 1e-8);
    CHECK(std::abs(oracle[0][1] - 1.0) < 1e-8);
    // G(−ν) = G(ν)*
    CHECK(std::abs(oracle[1][1] - oracle[2][1]) < 1e-10);
    CHECK(std::abs(oracle[1][2] + oracle[2][2]) < 1e-10);
    CHECK(std::abs(path[1][2] + path[2][2]) < 1e-10);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(path[j][1] - oracle[j][1]) + std::abs(path[j][2] - oracle[j][2]) < 5e-3);

    const ResultRecord rec = read_record(dir / "heatgf.json");
    CHECK(rec.kind == "gf");
    CHECK(rec.values["first_moment"]["relative_difference"].get<double>() < 1e-5);
}

TEST_CASE("verify command") {
    SUBCASE("passes on a small harmonic run") {
        const fs::path dir = scratch("verify_ok");
        const Run r = run_small("verify", kSmall, dir);
        CHECK(r.code == kOk);
        CHECK(r.out.find("all checks passed") != std::string::npos);
        const ResultRecord rec = read_record(dir / "verify.json");
        CHECK(rec.kind == "verify");
        CHECK(rec.values["passed"].get<bool>());
        CHECK_FALSE(rec.wall_time.has_value());
    }
    SUBCASE("a starved Fock space fails") {
        const fs::path dir = scratch("verify_fock");
        const Run r = run_small("verify",
                                replace(kSmall, "- {omega: 1, mass: 1, coupling: 0.3}",
                                        "- {omega: 1, mass: 1, coupling: 0.3}\n    n_fock: [2]"),
                                dir);
        CHECK(r.code == kVerifyFailed);
        CHECK(r.out.find("fock_leakage") != std::string::npos);
    }
    SUBCASE("non-Gaussian bath skips the Wick checks") {
        const fs::path dir = scratch("verify_kerr");
        const Run r = run_small("verify", replace(kSmall, "- beta: 2", "- beta: 2\n    kerr: 0.2") + "order: 4\n", dir);
        CHECK(r.code == kOk);
        CHECK(r.out.find("wick_g3") != std::string::npos);
        CHECK(r.out.find("SKIP") != std::string::npos);
        const ResultRecord rec = read_record(dir / "verify.json");
        bool round_trip = false;
        for (const auto& row : rec.values["checks"])
            if (row["name"] == "cumulant_round_trip[0]") round_trip = row["status"] == "PASS";
        CHECK(round_trip);
    }
}

TEST_CASE("records") {
    ResultRecord r = make_record("gf");
    r.parameters["x"] = 1.5;
    r.values["G"] = complex_json(cplx{0.25, -1.0});
    r.tolerances["t"] = 1e-8;
    r.wall_time = 0.5;
    const fs::path dir = scratch("records");
    write_record(dir / "r.json", r);
    CHECK(read_record(dir / "r.json") == r);
    CHECK(complex_from_json(r.values["G"]) == cplx{0.25, -1.0});

    DenseOp m(2, 2);
    m << cplx{1.0, 2.0}, 3.0, cplx{0.0, -1.0}, 0.125;
    CHECK(matrix_from_json(matrix_json(m)) == m);

    nlohmann::json j = to_json(r);
    j["schema_version"] = 99;
    CHECK_THROWS(record_from_json(j));
    j = to_json(r);
    j.erase("kind");
    CHECK_THROWS(record_from_json(j));
}

TEST_CASE("verify output is byte-identical across runs") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    REQUIRE(run_small("verify", kSmall, a).code == kOk);
    REQUIRE(run_small("verify", kSmall, b).code == kOk);
    // the output directory is not part of the record
    CHECK(slurp(a / "verify.json") == slurp(b / "verify.json"));
}
