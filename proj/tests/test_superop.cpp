#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fvheat/superop.hpp"
#include "fvheat/system.hpp"

using namespace fvheat;
using namespace fvheat::superop;

namespace {

DenseOp random_op(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    DenseOp m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx{g(rng), g(rng)};
    return m;
}

DenseOp random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
    const DenseOp a = random_op(n, rng);
    return 0.5 * (a + a.adjoint());
}

// e^{−iHt} from the spectral decomposition
DenseOp unitary(const DenseOp& h, double t) {
    Eigen::SelfAdjointEigenSolver<DenseOp> eig(h);
    Eigen::VectorXcd ph(h.rows());
    for (Eigen::Index j = 0; j < h.rows(); ++j) ph(j) = std::exp(cplx{0.0, -eig.eigenvalues()(j) * t});
    return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("vec and unvec are inverse") {
    std::mt19937_64 rng(1);
    const DenseOp r = random_op(3, rng);
    CHECK((unvec(vec(r), 3) - r).norm() == 0.0);
    CHECK(vec(r)(1) == r(1, 0));
    CHECK(vec(r)(3) == r(0, 1));
}

TEST_CASE("lifted operators act on the proper side") {
    std::mt19937_64 rng(2);
    const DenseOp a = random_op(3, rng);
    const DenseOp r = random_op(3, rng);
    CHECK((superop::apply(lift(a, Side::Left), r) - a * r).norm() < 1e-12);
    CHECK((superop::apply(lift(a, Side::Right), r) - r * a).norm() < 1e-12);
    CHECK((superop::apply(lift_signed(a, Side::Left), r) - a * r).norm() < 1e-12);
    CHECK((superop::apply(lift_signed(a, Side::Right), r) + r * a).norm() < 1e-12);
    const DenseOp v = random_hermitian(3, rng);
    const cplx i{0.0, 1.0};
    CHECK((superop::apply(commutator_generator(v), r) + i * (v * r - r * v)).norm() < 1e-12);
    CHECK_THROWS_AS((void)superop::apply(lift(a, Side::Left), random_op(2, rng)), std::invalid_argument);
}

TEST_CASE("left and right lifts commute") {
    std::mt19937_64 rng(3);
    const SuperOp l = lift(random_op(2, rng), Side::Left);
    const SuperOp r = lift(random_op(2, rng), Side::Right);
    CHECK((l * r - r * l).norm() < 1e-12);
}

TEST_CASE("hermiticity test") {
    std::mt19937_64 rng(4);
    CHECK(is_hermitian(random_hermitian(4, rng)));
    CHECK_FALSE(is_hermitian(random_op(4, rng)));
    CHECK_FALSE(is_hermitian(DenseOp::Zero(2, 3)));
}

TEST_CASE("matrix exponential matches the spectral form") {
    std::mt19937_64 rng(5);
    const DenseOp h = random_hermitian(4, rng);
    const cplx minus_i{0.0, -1.0};
    CHECK((expm(minus_i * 0.7 * h) - unitary(h, 0.7)).norm() < 1e-12);
}

TEST_CASE("ordered propagation") {
    std::mt19937_64 rng(6);
    const DenseOp h0 = random_hermitian(3, rng);
    const DenseOp h1 = random_hermitian(3, rng);
    const cplx minus_i{0.0, -1.0};

    SUBCASE("constant generator is exact") {
        const auto u = propagate_ordered([&](double) { return Eigen::MatrixXcd(minus_i * h0); }, 0.2, 1.5, 7);
        CHECK((u - unitary(h0, 1.3)).norm() < 1e-12);
    }
    SUBCASE("commuting generators integrate exactly at midpoints for linear f") {
        const auto u = propagate_ordered([&](double t) { return Eigen::MatrixXcd(minus_i * (1.0 + 2.0 * t) * h0); }, 0.0,
                                         1.0, 5);
        CHECK((u - unitary(h0, 2.0)).norm() < 1e-12);
    }
    SUBCASE("second-order convergence, latest step leftmost") {
        auto gen = [&](double t) { return Eigen::MatrixXcd(minus_i * (h0 + std::sin(3.0 * t) * h1)); };
        const auto ref = propagate_ordered(gen, 0.0, 1.0, 4096);
        const double e1 = (propagate_ordered(gen, 0.0, 1.0, 20) - ref).norm();
        const double e2 = (propagate_ordered(gen, 0.0, 1.0, 40) - ref).norm();
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
        // two steps by hand
        const auto two = propagate_ordered(gen, 0.0, 1.0, 2);
        const DenseOp by_hand = expm(gen(0.75) * 0.5) * expm(gen(0.25) * 0.5);
        CHECK((two - by_hand).norm() < 1e-12);
    }
    CHECK_THROWS_AS((void)propagate_ordered([&](double) { return Eigen::MatrixXcd(h0); }, 0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("system model") {
    const SystemModel m = SystemModel::make(0.5 * pauli_x(), pauli_z());
    CHECK(m.dim() == 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
        const Eigen::VectorXcd v = m.x_eigenbasis.col(j);
        CHECK((m.x_s * v - m.x_eigenvalues(j) * v).norm() < 1e-12);
    }
    CHECK_THROWS_AS((void)SystemModel::make(pauli_y() * cplx{0.0, 1.0}, pauli_z()), std::invalid_argument);
    CHECK_THROWS_AS((void)SystemModel::make(pauli_x(), DenseOp::Identity(3, 3)), std::invalid_argument);

    const SystemModel c = m.with_counter_term(0.25);
    CHECK((c.h_s - (m.h_s + 0.25 * pauli_z() * pauli_z())).norm() < 1e-15);
}

TEST_CASE("density validation") {
    DenseOp rho = DenseOp::Zero(2, 2);
    rho(0, 0) = 1.0;
    CHECK_NOTHROW(validate_density(rho, 2));
    CHECK_THROWS_AS((void)validate_density(rho, 3), std::invalid_argument);
    DenseOp bad = rho;
    bad(1, 1) = 0.5;
    CHECK_THROWS_AS((void)validate_density(bad, 2), std::invalid_argument);
    DenseOp neg = DenseOp::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS((void)validate_density(neg, 2), std::invalid_argument);
    DenseOp nh = 0.5 * DenseOp::Identity(2, 2);
    nh(0, 1) = 0.1;
    CHECK_THROWS_AS((void)validate_density(nh, 2), std::invalid_argument);
}
