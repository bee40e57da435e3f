#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "fvheat/cumulants.hpp"

using namespace fvheat;
using namespace fvheat::cumulants;

namespace {

// A deterministic but structureless value for every sub-collection.
cplx synthetic_cumulant(const Branches& b, const Times& t) {
    cplx v{0.1 * static_cast<double>(t.size()), 0.0};
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double s = b[j] == Branch::Plus ? 1.0 : -0.7;
        v += cplx{std::sin(1.3 * t[j] + static_cast<double>(j)), s * std::cos(0.4 * t[j])};
    }
    return v;
}

}  // namespace

TEST_CASE("set partitions are counted by the Bell numbers") {
    const int bell[] = {1, 1, 2, 5, 15, 52, 203};
    for (int n = 0; n <= 6; ++n) CHECK(set_partitions(n).size() == static_cast<std::size_t>(bell[n]));
    CHECK(set_partitions(4, 2).size() == 4);
    CHECK(set_partitions(6, 2).size() == 41);
    CHECK_THROWS_AS(set_partitions(-1), std::invalid_argument);
}

TEST_CASE("perfect matchings") {
    CHECK(perfect_matchings(2).size() == 1);
    CHECK(perfect_matchings(4).size() == 3);
    CHECK(perfect_matchings(6).size() == 15);
    CHECK(perfect_matchings(3).empty());
}

TEST_CASE("grouping multiplicities agree with enumeration") {
    for (int order = 1; order <= 6; ++order) {
        const auto g = GroupingExpansion::make(order, false);
        std::size_t total = 0;
        for (const auto& [type, count] : g.type_counts()) {
            CHECK(grouping_multiplicity(order, type) == count);
            total += count;
        }
        CHECK(total == g.partitions.size());
    }
    // four points with G_1 = 0: one fourth cumulant and three pair products
    const auto g4 = GroupingExpansion::make(4, true);
    CHECK(g4.partitions.size() == 4);
    CHECK(grouping_multiplicity(4, {0, 2, 0, 0}) == 3);
    CHECK_THROWS_AS(grouping_multiplicity(4, {1, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("moment-cumulant recursion inverts the grouping sum") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const CorrelatorSource moments = [](const Branches& b, const Times& t) {
        return grouping_reconstruct(synthetic_cumulant, b, t);
    };
    for (std::size_t n = 1; n <= 4; ++n) {
        Branches b;
        Times t;
        for (std::size_t j = 0; j < n; ++j) {
            b.push_back(j % 2 == 0 ? Branch::Plus : Branch::Minus);
            t.push_back(u(rng));
        }
        CHECK(std::abs(cumulant_from_correlators(moments, b, t) - synthetic_cumulant(b, t)) < 1e-12);
    }
    CHECK_THROWS_AS(cumulant_from_correlators(moments, Branches(5, Branch::Plus), Times(5, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(cumulant_from_correlators(moments, Branches(2, Branch::Plus), Times(3, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("Gaussian moments have no cumulants beyond the second") {
    // zero-mean moments given by pair sums of a symmetric covariance
    auto cov = [](double a, double b) { return std::exp(-std::abs(a - b)) + 0.2; };
    const CorrelatorSource moments = [&](const Branches&, const Times& t) -> cplx {
        if (t.size() % 2 == 1) return 0.0;
        cplx total = 0.0;
        for (const auto& m : perfect_matchings(static_cast<int>(t.size()))) {
            double term = 1.0;
            for (const auto& p : m) term *= cov(t[static_cast<std::size_t>(p[0])], t[static_cast<std::size_t>(p[1])]);
            total += term;
        }
        return total;
    };
    const Times t{0.3, 1.1, 2.0, 2.9};
    CHECK(std::abs(cumulant_from_correlators(moments, Branches(4, Branch::Plus), t)) < 1e-13);
    CHECK(std::abs(cumulant_from_correlators(moments, Branches(3, Branch::Plus), {0.1, 0.5, 0.9})) < 1e-13);
    CHECK(cumulant_from_correlators(moments, Branches(2, Branch::Plus), {0.1, 0.5}) == cplx{cov(0.1, 0.5), 0.0});
}

TEST_CASE("second-order amplitudes") {
    const OrderedTraces2 t{cplx{1.0, 2.0}, cplx{0.5, -1.0}};
    const AmplitudeSet2 a = amplitudes2(t);
    CHECK(a.a_prime == cplx{0.5, 3.0});
    CHECK(a.b_prime == cplx{1.5, 1.0});
    const TraceSource2 src = [&](double, double) { return t; };
    CHECK_THROWS_AS(amplitudes2(src, 0.1, 0.2), std::invalid_argument);
}

TEST_CASE("third-order amplitudes from synthetic traces") {
    const OrderedTraces3 t{1.0, 2.0, 4.0, 8.0};
    const AmplitudeSet3 a = amplitudes3(t);
    CHECK(a.a == cplx{1.0 - 2.0 - 4.0 + 8.0});
    CHECK(a.b == cplx{1.0 + 2.0 - 4.0 - 8.0});
    CHECK(a.c == cplx{1.0 - 2.0 + 4.0 - 8.0});
    CHECK(a.d == cplx{15.0});
    const TraceSource3 src = [&](double, double, double) { return t; };
    CHECK_THROWS_AS(amplitudes3(src, 0.3, 0.2, 0.25), std::invalid_argument);
}

TEST_CASE("fourth-order sign table") {
    const std::array<int, 8> expected_sums{0, 0, 0, 0, 0, 0, 0, 8};
    for (std::size_t r = 0; r < 8; ++r) {
        int sum = 0;
        for (int s : kFourthOrderSigns[r]) sum += s;
        CHECK(sum == expected_sums[r]);
    }
    CHECK(derive_fourth_order_signs() == kFourthOrderSigns);
    CHECK_NOTHROW(check_fourth_order_signs());
    for (const auto& p : kFourthOrderPermutations) {
        std::array<int, 4> sorted = p;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::array<int, 4>{0, 1, 2, 3});
    }
}

TEST_CASE("fourth-order amplitudes from synthetic inputs") {
    SUBCASE("unit inputs give the row sums") {
        std::array<cplx, 8> ones;
        ones.fill(1.0);
        const AmplitudeSet4 a = amplitudes4(ones);
        for (std::size_t r = 0; r < 7; ++r) CHECK(a.a[r] == cplx{0.0});
        CHECK(a(Branch::Minus, Branch::Minus, Branch::Minus) == cplx{8.0});
    }
    SUBCASE("basis inputs give the table columns") {
        for (std::size_t k = 0; k < 8; ++k) {
            std::array<cplx, 8> e{};
            e[k] = 1.0;
            const AmplitudeSet4 a = amplitudes4(e);
            for (std::size_t r = 0; r < 8; ++r) CHECK(a.a[r] == cplx{static_cast<double>(kFourthOrderSigns[r][k])});
        }
    }
    SUBCASE("source evaluation uses the listed orderings") {
        const double s = 4.0, u = 3.0, v = 2.0, w = 1.0;
        const Cumulant4Source g = [](double a, double b, double c, double d) {
            return cplx{1000.0 * a + 100.0 * b + 10.0 * c + d, 0.0};
        };
        const AmplitudeSet4 a = amplitudes4(g, s, u, v, w);
        const double t[4] = {s, u, v, w};
        std::array<cplx, 8> expect_in;
        for (std::size_t k = 0; k < 8; ++k) {
            const auto& p = kFourthOrderPermutations[k];
            expect_in[k] = g(t[p[0]], t[p[1]], t[p[2]], t[p[3]]);
        }
        CHECK(a.a == amplitudes4(expect_in).a);
        CHECK_THROWS_AS(amplitudes4(g, s, v, u, w), std::invalid_argument);
    }
}
