// cumulants.hpp: Time-ordered cumulants, grouping expansions and higher-order amplitudes
//
// A correlator source maps (branches, times) of any sub-collection of the original indices,
// kept in their original relative order, to a complex value. Branch-indexed super-operator
// correlators and plain operator-ordered correlators both fit this shape: the latter simply
// ignore the branch labels and multiply in positional order.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "fvheat/types.hpp"

namespace fvheat::cumulants {

using Branches = std::vector<Branch>;
using Times = std::vector<double>;
using CorrelatorSource = std::function<cplx(const Branches&, const Times&)>;

using Block = std::vector<int>;
using Partition = std::vector<Block>;

// All set partitions of {0..n−1} whose blocks have size >= min_block. Blocks are listed by
// smallest element, elements within a block ascending.
std::vector<Partition> set_partitions(int n, int min_block = 1);

// Perfect matchings of {0..n−1}; (n−1)!! of them for even n, none for odd n.
std::vector<Partition> perfect_matchings(int n);

// N! / (n_1! n_2! (2!)^{n_2} n_3! (3!)^{n_3} ⋯) with counts[j] = number of blocks of size j+1.
std::size_t grouping_multiplicity(int order, const std::vector<int>& counts);

struct GroupingExpansion {
    int order{0};
    bool drop_singletons{false};  // G_1 = 0
    std::vector<Partition> partitions;

    static GroupingExpansion make(int order, bool drop_singletons);

    // Number of partitions of each block-size type, keyed by the count vector.
    std::map<std::vector<int>, std::size_t> type_counts() const;
};

struct CumulantTensor {
    int order{0};
    Branches branches;
    Times times;
    double nu{0.0};
    cplx value;
};

// G_N from correlators by the moment-cumulant recursion, N in 1..4.
// Throws std::invalid_argument for larger orders or mismatched lengths.
cplx cumulant_from_correlators(const CorrelatorSource& correlator, const Branches& branches,
                               const Times& times);

// Σ over all groupings Π G_{|block|}; N in 1..6.
cplx grouping_reconstruct(const CorrelatorSource& cumulant, const Branches& branches,
                          const Times& times);

// ---------------------------------------------------------------- second order

struct AmplitudeSet2 {
    cplx a_prime;  // tr[Y(s)(Y(u)ρ − ρY(u))]
    cplx b_prime;  // tr[Y(s)(Y(u)ρ + ρY(u))]
};

// tr[Y(s)Y(u)ρ] and tr[Y(s)ρY(u)]
struct OrderedTraces2 {
    cplx left;
    cplx split;
};

using TraceSource2 = std::function<OrderedTraces2(double s, double u)>;

AmplitudeSet2 amplitudes2(const OrderedTraces2& traces);
AmplitudeSet2 amplitudes2(const TraceSource2& source, double s, double u);

// ---------------------------------------------------------------- third order

struct AmplitudeSet3 {
    cplx a, b, c, d;
};

// The four orderings that survive time ordering with s > u > v and Y(s) leftmost:
// t1 = tr[Y(s)Y(u)Y(v)ρ], t2 = tr[Y(s)Y(u)ρY(v)], t3 = tr[Y(s)Y(v)ρY(u)], t4 = tr[Y(s)ρY(v)Y(u)].
struct OrderedTraces3 {
    cplx t1, t2, t3, t4;
};

using TraceSource3 = std::function<OrderedTraces3(double s, double u, double v)>;

AmplitudeSet3 amplitudes3(const OrderedTraces3& traces);
// Requires s > u > v.
AmplitudeSet3 amplitudes3(const TraceSource3& source, double s, double u, double v);
// Same amplitudes from branch-indexed third cumulants G_3^{+ d_u d_v}(s, u, v).
AmplitudeSet3 amplitudes3_from_cumulants(const CorrelatorSource& branch_cumulant3, double s,
                                         double u, double v);

// ---------------------------------------------------------------- fourth order

// Row order of the eight fourth-order amplitudes A_{pqr}.
inline constexpr std::array<std::array<Branch, 3>, 8> kFourthOrderRows{{
    {Branch::Plus, Branch::Plus, Branch::Plus},
    {Branch::Plus, Branch::Plus, Branch::Minus},
    {Branch::Plus, Branch::Minus, Branch::Plus},
    {Branch::Minus, Branch::Plus, Branch::Plus},
    {Branch::Plus, Branch::Minus, Branch::Minus},
    {Branch::Minus, Branch::Plus, Branch::Minus},
    {Branch::Minus, Branch::Minus, Branch::Plus},
    {Branch::Minus, Branch::Minus, Branch::Minus},
}};

// Operator orderings of the fourth cumulant entering every A_{pqr}, as positions into
// (s, u, v, w): G_4(s,u,v,w), G_4(w,v,u,s), G_4(w,s,u,v), G_4(v,s,u,w), G_4(u,s,v,w),
// G_4(v,u,s,w), G_4(w,u,s,v), G_4(w,v,s,u).
inline constexpr std::array<std::array<int, 4>, 8> kFourthOrderPermutations{{
    {0, 1, 2, 3},
    {3, 2, 1, 0},
    {3, 0, 1, 2},
    {2, 0, 1, 3},
    {1, 0, 2, 3},
    {2, 1, 0, 3},
    {3, 1, 0, 2},
    {3, 2, 0, 1},
}};

using SignMatrix = std::array<std::array<int, 8>, 8>;

// sign[row][k] multiplies the k-th permuted G_4 in amplitude row `row`.
extern const SignMatrix kFourthOrderSigns;

// The same table rebuilt from the branch expansion Q = (ζ₊+ζ₋)/2, Q̃ = (ζ₊−ζ₋)/2.
SignMatrix derive_fourth_order_signs();

// Throws std::logic_error if the literal table disagrees with its row-sum pattern
// {0,0,0,0,0,0,0,8} or with derive_fourth_order_signs().
void check_fourth_order_signs();

struct AmplitudeSet4 {
    std::array<cplx, 8> a{};  // in kFourthOrderRows order

    cplx operator()(Branch p, Branch q, Branch r) const;
};

// Operator-ordered fourth cumulant G_4(t1, t2, t3, t4).
using Cumulant4Source = std::function<cplx(double, double, double, double)>;

AmplitudeSet4 amplitudes4(const std::array<cplx, 8>& permuted_g4);
// Requires s > u > v > w.
AmplitudeSet4 amplitudes4(const Cumulant4Source& g4, double s, double u, double v, double w);
// Same amplitudes from branch-indexed fourth cumulants G_4^{+ d_u d_v d_w}(s, u, v, w).
AmplitudeSet4 amplitudes4_from_cumulants(const CorrelatorSource& branch_cumulant4, double s,
                                         double u, double v, double w);

}  // namespace fvheat::cumulants
