// influence.hpp: Discretized influence functional and the path-pair sum
//
// Paths are piecewise constant on slices of a uniform grid and take values among the
// eigenvalues of X_S. A path pair is the forward sequence q and the backward sequence q̃ of
// eigenvalue indices. The influence exponent of a pair is a sum of slice-pair terms built
// from cell integrals of the bath kernels.

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fvheat/bath.hpp"
#include "fvheat/cumulants.hpp"
#include "fvheat/system.hpp"
#include "fvheat/types.hpp"

namespace fvheat::influence {

struct PathGrid {
    double t_i{0.0};
    double t_f{1.0};
    int n_slices{1};

    static PathGrid make(double t_i, double t_f, int n_slices);

    double dt() const { return (t_f - t_i) / n_slices; }
    double slice_start(int k) const { return t_i + k * dt(); }
    double midpoint(int k) const { return t_i + (k + 0.5) * dt(); }
    // Throws std::invalid_argument unless n_slices >= 1 and t_f > t_i.
    void validate() const;

    bool operator==(const PathGrid&) const = default;
};

struct PathPair {
    std::vector<int> q;
    std::vector<int> q_tilde;
};

using Table = Eigen::MatrixXd;
using CTable = Eigen::MatrixXcd;

// Cell integrals of one bath's kernels on a grid.
// eta_r, eta_i: ∬ κ_r, κ_i over slice k × slice k′ for k > k′; the diagonal integrates over
// the triangle s > s′. Entries with k < k′ are zero.
// cross: ∬ (κ_r + iκ_i)(s − s′ + ν) over the full square slice k × slice k′, all k, k′.
struct InfluenceCoefficients {
    PathGrid grid;
    double nu{0.0};
    int gauss_order{8};
    Table eta_r;
    Table eta_i;
    CTable cross;

    // The cross block at ν = 0 rebuilt from eta_r and eta_i alone.
    CTable unshifted_cross() const;
};

InfluenceCoefficients discretize_action(const bath::KernelSource& kernel, const PathGrid& grid,
                                        double nu, int gauss_order = 8);
InfluenceCoefficients discretize_action(const bath::BathSpec& bath, const PathGrid& grid, double nu,
                                        int gauss_order = 8);

// Exponent contribution of slices k >= k′ with forward values (x, x′) and backward values
// (y, y′), using the given cross block.
cplx pair_term(const InfluenceCoefficients& c, const CTable& cross, int k, int kp, double x, double xp,
               double y, double yp);

// iΦ of a path pair with the unshifted cross block.
cplx fv_exponent(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues);
cplx fv_weight(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues);
// Same, with the ν-shifted cross block.
cplx heat_gf_exponent(const InfluenceCoefficients& c, const PathPair& pair,
                      const Eigen::VectorXd& eigenvalues);
cplx heat_gf_weight(const InfluenceCoefficients& c, const PathPair& pair, const Eigen::VectorXd& eigenvalues);

// Third- and fourth-order amplitudes at slice midpoints, multiplied by the coupling window.
// Only strictly ordered slice tuples are filled; order 3 fills a3, order 4 fills both.
struct HigherOrderKernels {
    PathGrid grid;
    int order{3};
    std::vector<cumulants::AmplitudeSet3> a3;  // index (s·n + u)·n + v
    std::vector<cumulants::AmplitudeSet4> a4;  // index ((s·n + u)·n + v)·n + w

    const cumulants::AmplitudeSet3& at3(int s, int u, int v) const;
    const cumulants::AmplitudeSet4& at4(int s, int u, int v, int w) const;
    bool is_zero(double tol) const;
};

HigherOrderKernels build_higher_order_kernels(const cumulants::TraceSource3& traces,
                                              const cumulants::Cumulant4Source& g4, const PathGrid& grid,
                                              int order, const std::optional<bath::Ramp>& ramp = std::nullopt);
HigherOrderKernels zero_higher_order_kernels(const PathGrid& grid, int order);

// S₃ + S₄ restricted to latest slice s, given values on slices 0..s. ζ± = q ± q̃.
cplx higher_order_increment(const HigherOrderKernels& k, int s, const std::vector<double>& zeta_plus,
                            const std::vector<double>& zeta_minus);
// e^{S₃+S₄} of a whole path pair. Throws std::invalid_argument on a grid mismatch.
cplx higher_order_weight(const HigherOrderKernels& k, const PathGrid& grid, const PathPair& pair,
                         const Eigen::VectorXd& eigenvalues);

struct BathInfluence {
    InfluenceCoefficients coeffs;
    std::optional<HigherOrderKernels> higher;
    bool counted{false};  // uses the shifted cross block in generating-function mode
};

enum class Mode { Density, GeneratingFunction };

struct PathSumOptions {
    double budget{1e8};  // maximum number of path pairs
    int threads{0};      // 0: FVHEAT_THREADS if set, else hardware concurrency
};

struct PathSumResult {
    DenseOp density;  // ρ_S(t_f) in the original basis (density mode)
    cplx gf{0.0, 0.0};  // tr_S Γ (generating-function mode)
    double path_pairs{0.0};
};

// Number of path pairs dim^(2·n_slices).
double path_pair_count(Eigen::Index dim, int n_slices);

// Throws BudgetExceeded when the pair count exceeds the budget, std::invalid_argument on
// grid mismatches or a counted bath that carries higher-order kernels in generating-function mode.
PathSumResult path_sum(const SystemModel& system, const std::vector<BathInfluence>& baths,
                       const DenseOp& rho_s0, Mode mode, const PathSumOptions& options = {});

int resolve_threads(int requested);

// CSV round trips for reuse across ν sweeps. The first line holds the grid and ν.
void write_coefficients_csv(std::ostream& os, const InfluenceCoefficients& c);
InfluenceCoefficients read_coefficients_csv(std::istream& is);
void write_higher_order_csv(std::ostream& os, const HigherOrderKernels& k);
HigherOrderKernels read_higher_order_csv(std::istream& is);

}  // namespace fvheat::influence
