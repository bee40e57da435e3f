// cumulants.cpp: Moment-cumulant recursion, groupings and amplitude tables

#include "fvheat/cumulants.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace fvheat::cumulants {

namespace {

void extend_partitions(int next, int n, Partition& current, std::vector<Partition>& out) {
    if (next == n) {
        out.push_back(current);
        return;
    }
    // by index: the recursion appends to `current` and may reallocate it
    for (std::size_t j = 0; j < current.size(); ++j) {
        current[j].push_back(next);
        extend_partitions(next + 1, n, current, out);
        current[j].pop_back();
    }
    current.push_back(Block{next});
    extend_partitions(next + 1, n, current, out);
    current.pop_back();
}

std::size_t factorial(int n) {
    std::size_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::size_t>(k);
    return f;
}

void check_lengths(const Branches& branches, const Times& times, const char* who) {
    if (branches.size() != times.size())
        throw std::invalid_argument(std::string(who) + ": branches and times differ in length");
    if (times.empty()) throw std::invalid_argument(std::string(who) + ": order must be >= 1");
}

// Restricts (branches, times) to the members of a block, keeping relative order.
std::pair<Branches, Times> restrict_to(const Block& block, const Branches& branches,
                                       const Times& times) {
    Branches b;
    Times t;
    for (int i : block) {
        b.push_back(branches[static_cast<std::size_t>(i)]);
        t.push_back(times[static_cast<std::size_t>(i)]);
    }
    return {b, t};
}

using Mask = unsigned;

Block members(Mask m) {
    Block b;
    for (int i = 0; m != 0; ++i, m >>= 1)
        if (m & 1u) b.push_back(i);
    return b;
}

class CumulantRecursion {
public:
    CumulantRecursion(const CorrelatorSource& c, const Branches& b, const Times& t)
        : correlator_(c), branches_(b), times_(t) {}

    cplx cumulant(Mask mask) {
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        const Block elems = members(mask);
        auto [b, t] = restrict_to(elems, branches_, times_);
        cplx value = correlator_(b, t);
        for (const auto& p : set_partitions(static_cast<int>(elems.size()))) {
            if (p.size() < 2) continue;
            cplx term{1.0, 0.0};
            for (const auto& block : p) {
                Mask sub = 0;
                for (int local : block) sub |= 1u << elems[static_cast<std::size_t>(local)];
                term *= cumulant(sub);
            }
            value -= term;
        }
        memo_.emplace(mask, value);
        return value;
    }

private:
    const CorrelatorSource& correlator_;
    const Branches& branches_;
    const Times& times_;
    std::unordered_map<Mask, cplx> memo_;
};

}  // namespace

std::vector<Partition> set_partitions(int n, int min_block) {
    if (n < 0) throw std::invalid_argument("set_partitions: n must be >= 0");
    std::vector<Partition> all;
    Partition current;
    extend_partitions(0, n, current, all);
    if (min_block <= 1) return all;
    std::vector<Partition> kept;
    for (auto& p : all) {
        const bool ok = std::all_of(p.begin(), p.end(), [&](const Block& b) {
            return static_cast<int>(b.size()) >= min_block;
        });
        if (ok) kept.push_back(std::move(p));
    }
    return kept;
}

std::vector<Partition> perfect_matchings(int n) {
    std::vector<Partition> out;
    for (auto& p : set_partitions(n, 2)) {
        if (std::all_of(p.begin(), p.end(), [](const Block& b) { return b.size() == 2; }))
            out.push_back(std::move(p));
    }
    return out;
}

std::size_t grouping_multiplicity(int order, const std::vector<int>& counts) {
    std::size_t denom = 1;
    int total = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const int size = static_cast<int>(j) + 1;
        total += size * counts[j];
        denom *= factorial(counts[j]);
        for (int c = 0; c < counts[j]; ++c) denom *= factorial(size);
    }
    if (total != order) throw std::invalid_argument("grouping_multiplicity: block sizes do not sum to order");
    return factorial(order) / denom;
}

GroupingExpansion GroupingExpansion::make(int order, bool drop_singletons) {
    if (order < 1) throw std::invalid_argument("GroupingExpansion: order must be >= 1");
    GroupingExpansion g;
    g.order = order;
    g.drop_singletons = drop_singletons;
    g.partitions = set_partitions(order, drop_singletons ? 2 : 1);
    return g;
}

std::map<std::vector<int>, std::size_t> GroupingExpansion::type_counts() const {
    std::map<std::vector<int>, std::size_t> counts;
    for (const auto& p : partitions) {
        std::vector<int> type(static_cast<std::size_t>(order), 0);
        for (const auto& b : p) ++type[b.size() - 1];
        ++counts[type];
    }
    return counts;
}

cplx cumulant_from_correlators(const CorrelatorSource& correlator, const Branches& branches,
                               const Times& times) {
    check_lengths(branches, times, "cumulant_from_correlators");
    if (times.size() > 4)
        throw std::invalid_argument("cumulant_from_correlators: orders above 4 are not implemented");
    CumulantRecursion rec(correlator, branches, times);
    return rec.cumulant((1u << times.size()) - 1u);
}

cplx grouping_reconstruct(const CorrelatorSource& cumulant, const Branches& branches,
                          const Times& times) {
    check_lengths(branches, times, "grouping_reconstruct");
    if (times.size() > 6)
        throw std::invalid_argument("grouping_reconstruct: orders above 6 are not implemented");
    cplx total{0.0, 0.0};
    for (const auto& p : set_partitions(static_cast<int>(times.size()))) {
        cplx term{1.0, 0.0};
        for (const auto& block : p) {
            auto [b, t] = restrict_to(block, branches, times);
            term *= cumulant(b, t);
        }
        total += term;
    }
    return total;
}

// ---------------------------------------------------------------- second order

AmplitudeSet2 amplitudes2(const OrderedTraces2& t) {
    return {t.left - t.split, t.left + t.split};
}

AmplitudeSet2 amplitudes2(const TraceSource2& source, double s, double u) {
    if (!(s > u)) throw std::invalid_argument("amplitudes2: requires s > u");
    return amplitudes2(source(s, u));
}

// ---------------------------------------------------------------- third order

AmplitudeSet3 amplitudes3(const OrderedTraces3& t) {
    return {
        t.t1 - t.t2 - t.t3 + t.t4,
        t.t1 + t.t2 - t.t3 - t.t4,
        t.t1 - t.t2 + t.t3 - t.t4,
        t.t1 + t.t2 + t.t3 + t.t4,
    };
}

AmplitudeSet3 amplitudes3(const TraceSource3& source, double s, double u, double v) {
    if (!(s > u && u > v)) throw std::invalid_argument("amplitudes3: requires s > u > v");
    return amplitudes3(source(s, u, v));
}

AmplitudeSet3 amplitudes3_from_cumulants(const CorrelatorSource& g3, double s, double u,
                                         double v) {
    if (!(s > u && u > v))
        throw std::invalid_argument("amplitudes3_from_cumulants: requires s > u > v");
    constexpr Branch P = Branch::Plus;
    constexpr Branch M = Branch::Minus;
    const Times t{s, u, v};
    OrderedTraces3 tr;
    tr.t1 = g3({P, P, P}, t);
    tr.t2 = g3({P, P, M}, t);
    tr.t3 = g3({P, M, P}, t);
    tr.t4 = g3({P, M, M}, t);
    return amplitudes3(tr);
}

// ---------------------------------------------------------------- fourth order

const SignMatrix kFourthOrderSigns{{
    {+1, -1, -1, -1, -1, +1, +1, +1},  // +++
    {+1, +1, +1, -1, -1, +1, -1, -1},  // ++-
    {+1, +1, -1, +1, -1, -1, +1, -1},  // +-+
    {+1, +1, -1, -1, +1, -1, -1, +1},  // -++
    {+1, -1, +1, +1, -1, -1, -1, +1},  // +--
    {+1, -1, +1, -1, +1, -1, +1, -1},  // -+-
    {+1, -1, -1, +1, +1, +1, -1, -1},  // --+
    {+1, +1, +1, +1, +1, +1, +1, +1},  // ---
}};

namespace {

// Positions of (s, u, v, w) in the operator product tr[Y Y Y Y ρ] for branch labels
// with s on the left branch: right-branch operators in ascending time, then left-branch
// operators in descending time (cyclic form of L ρ R).
std::array<int, 4> operator_order(const std::array<Branch, 3>& duvw) {
    std::array<int, 4> order{};
    int n = 0;
    for (int pos = 3; pos >= 1; --pos)
        if (duvw[static_cast<std::size_t>(pos - 1)] == Branch::Minus) order[static_cast<std::size_t>(n++)] = pos;
    order[static_cast<std::size_t>(n++)] = 0;
    for (int pos = 1; pos <= 3; ++pos)
        if (duvw[static_cast<std::size_t>(pos - 1)] == Branch::Plus) order[static_cast<std::size_t>(n++)] = pos;
    return order;
}

// Coefficient of ζ_p in the path factor of a slot: +branch contributes Q, −branch −Q̃.
int slot_coefficient(Branch d, Branch p) {
    if (d == Branch::Plus) return 1;
    return p == Branch::Plus ? -1 : 1;
}

std::size_t row_index(Branch p, Branch q, Branch r) {
    for (std::size_t k = 0; k < kFourthOrderRows.size(); ++k) {
        const auto& row = kFourthOrderRows[k];
        if (row[0] == p && row[1] == q && row[2] == r) return k;
    }
    throw std::logic_error("row_index: unreachable");
}

std::array<std::array<Branch, 3>, 8> all_branch_patterns() {
    std::array<std::array<Branch, 3>, 8> out{};
    for (int m = 0; m < 8; ++m)
        for (int j = 0; j < 3; ++j)
            out[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] =
                ((m >> (2 - j)) & 1) ? Branch::Minus : Branch::Plus;
    return out;
}

}  // namespace

SignMatrix derive_fourth_order_signs() {
    SignMatrix signs{};
    for (const auto& duvw : all_branch_patterns()) {
        const auto order = operator_order(duvw);
        const auto it = std::find(kFourthOrderPermutations.begin(), kFourthOrderPermutations.end(), order);
        if (it == kFourthOrderPermutations.end())
            throw std::logic_error("derive_fourth_order_signs: ordering missing from the permutation list");
        const auto k = static_cast<std::size_t>(it - kFourthOrderPermutations.begin());
        for (std::size_t row = 0; row < 8; ++row) {
            int sign = 1;
            for (std::size_t j = 0; j < 3; ++j) sign *= slot_coefficient(duvw[j], kFourthOrderRows[row][j]);
            signs[row][k] = sign;
        }
    }
    return signs;
}

void check_fourth_order_signs() {
    constexpr std::array<int, 8> expected_row_sums{0, 0, 0, 0, 0, 0, 0, 8};
    for (std::size_t row = 0; row < 8; ++row) {
        const int sum = std::accumulate(kFourthOrderSigns[row].begin(), kFourthOrderSigns[row].end(), 0);
        if (sum != expected_row_sums[row])
            throw std::logic_error("fourth-order sign table: row " + std::to_string(row) + " sums to " +
                                   std::to_string(sum));
    }
    if (derive_fourth_order_signs() != kFourthOrderSigns)
        throw std::logic_error("fourth-order sign table disagrees with the branch expansion");
}

cplx AmplitudeSet4::operator()(Branch p, Branch q, Branch r) const { return a[row_index(p, q, r)]; }

AmplitudeSet4 amplitudes4(const std::array<cplx, 8>& g) {
    AmplitudeSet4 out;
    for (std::size_t row = 0; row < 8; ++row) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = 0; k < 8; ++k) acc += static_cast<double>(kFourthOrderSigns[row][k]) * g[k];
        out.a[row] = acc;
    }
    return out;
}

AmplitudeSet4 amplitudes4(const Cumulant4Source& g4, double s, double u, double v, double w) {
    if (!(s > u && u > v && v > w)) throw std::invalid_argument("amplitudes4: requires s > u > v > w");
    const std::array<double, 4> t{s, u, v, w};
    std::array<cplx, 8> g{};
    for (std::size_t k = 0; k < 8; ++k) {
        const auto& p = kFourthOrderPermutations[k];
        g[k] = g4(t[static_cast<std::size_t>(p[0])], t[static_cast<std::size_t>(p[1])],
                  t[static_cast<std::size_t>(p[2])], t[static_cast<std::size_t>(p[3])]);
    }
    return amplitudes4(g);
}

AmplitudeSet4 amplitudes4_from_cumulants(const CorrelatorSource& g4, double s, double u, double v,
                                         double w) {
    if (!(s > u && u > v && v > w))
        throw std::invalid_argument("amplitudes4_from_cumulants: requires s > u > v > w");
    const Times t{s, u, v, w};
    AmplitudeSet4 out;
    for (const auto& duvw : all_branch_patterns()) {
        const cplx g = g4({Branch::Plus, duvw[0], duvw[1], duvw[2]}, t);
        for (std::size_t row = 0; row < 8; ++row) {
            int sign = 1;
            for (std::size_t j = 0; j < 3; ++j) sign *= slot_coefficient(duvw[j], kFourthOrderRows[row][j]);
            out.a[row] += static_cast<double>(sign) * g;
        }
    }
    return out;
}

}  // namespace fvheat::cumulants
