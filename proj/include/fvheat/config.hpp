// config.hpp: Run configuration parsed from a YAML file

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fvheat/bath.hpp"
#include "fvheat/influence.hpp"
#include "fvheat/system.hpp"
#include "fvheat/types.hpp"

namespace fvheat::cli {

// Parse or validation failure; the message carries line and field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BathConfig {
    bath::BathSpec spec;
    double kerr{0.0};
    std::optional<std::vector<int>> n_fock;
};

struct OracleConfig {
    double leakage{1e-6};
    long max_dim{4096};
    int n_steps{200};
};

struct KernelExport {
    double tau_max{5.0};
    std::size_t n_samples{201};
};

struct VerifyConfig {
    std::uint64_t seed{20240611};
    int samples{20};
    double engine_tol{5e-3};       // max |ρ_path − ρ_oracle|
    double gf_tol{5e-3};           // max |G_path − G_oracle|
    double collapse_tol{1e-10};    // ν = 0: gf vs tr ρ on the path sum
    double unit_tol{1e-8};         // ν = 0: G = 1
    double shift_tol{1e-7};        // time-shift kernel theorem
    double wick3_tol{1e-8};
    double wick4_tol{1e-7};
    double reconstruct_tol{1e-7};
    double largest_time_tol{1e-9};
    double identity_tol{1e-8};
    double first_moment_rel_tol{1e-5};
    double hermiticity_tol{1e-9};
};

struct RunConfig {
    std::filesystem::path source;
    SystemModel system;
    DenseOp rho0;
    bool counter_term{false};
    std::vector<BathConfig> baths;
    std::size_t counted_bath{0};
    influence::PathGrid grid;
    std::vector<double> nu{0.0};
    int order{2};
    int gauss_order{8};
    OracleConfig oracle;
    KernelExport kernels;
    std::filesystem::path output{"out"};
    double budget{1e8};
    VerifyConfig verify;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& source = "<string>");

}  // namespace fvheat::cli
