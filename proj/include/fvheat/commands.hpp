// commands.hpp: The fvheat subcommands and the engine plumbing they share

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fvheat/config.hpp"
#include "fvheat/influence.hpp"
#include "fvheat/oracle.hpp"
#include "fvheat/records.hpp"

namespace fvheat::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kBudgetExceeded = 3 };

// ---------------------------------------------------------------- engines

std::vector<oracle::TruncatedBath> truncated_baths(const RunConfig& cfg);

// Harmonic baths use the closed-form kernels; Kerr baths the exact correlator of their
// truncated Fock space.
bath::KernelSource kernel_source(const BathConfig& b, const oracle::TruncatedBath& tb);

// One BathInfluence per bath at the given ν. In generating-function mode the counted bath
// carries no higher-order kernels; a note is appended when that drops a non-Wick bath's terms.
std::vector<influence::BathInfluence> bath_influences(const RunConfig& cfg,
                                                      const std::vector<oracle::TruncatedBath>& baths, double nu,
                                                      influence::Mode mode, std::vector<std::string>* notes = nullptr);

bool path_sum_enabled(const RunConfig& cfg);

DenseOp path_density(const RunConfig& cfg, const std::vector<oracle::TruncatedBath>& baths);
cplx path_generating_function(const RunConfig& cfg, const std::vector<oracle::TruncatedBath>& baths, double nu);

oracle::ExactEvolver make_evolver(const RunConfig& cfg, const std::vector<oracle::TruncatedBath>& baths);

// −i ∂_ν ln G at 0 by central differences with one Richardson step.
template <class G>
cplx richardson_first_moment(G&& g, double step) {
    auto central = [&](double h) { return (g(h) - g(-h)) / (2.0 * h); };
    const cplx d = (4.0 * central(0.5 * step) - central(step)) / 3.0;
    return cplx{0.0, -1.0} * d / g(0.0);
}

// ---------------------------------------------------------------- verify

struct CheckResult {
    std::string name;
    bool passed{false};
    bool skipped{false};
    double residual{0.0};
    double tolerance{0.0};
    std::string note;
};

std::vector<CheckResult> run_checks(const RunConfig& cfg);

// ---------------------------------------------------------------- commands

int cmd_kernels(const RunConfig& cfg, std::ostream& out);
int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_heatgf(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line: parse, apply overrides, dispatch, map exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fvheat::cli
