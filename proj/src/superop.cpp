// superop.cpp: Lifting, Liouvillians and ordered propagation

#include "fvheat/superop.hpp"

#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace fvheat::superop {

bool is_hermitian(const DenseOp& op, double tol) {
    if (op.rows() != op.cols()) return false;
    return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXcd vec(const DenseOp& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

DenseOp unvec(const Eigen::VectorXcd& v, Eigen::Index dim) {
    if (v.size() != dim * dim) throw std::invalid_argument("unvec: size is not dim^2");
    return Eigen::Map<const DenseOp>(v.data(), dim, dim);
}

SuperOp lift(const DenseOp& op, Side side) {
    if (op.rows() != op.cols()) throw std::invalid_argument("lift: operator is not square");
    const DenseOp id = DenseOp::Identity(op.rows(), op.cols());
    if (side == Side::Left) return Eigen::kroneckerProduct(id, op);
    return Eigen::kroneckerProduct(op.transpose(), id);
}

SuperOp lift_signed(const DenseOp& op, Side side) {
    if (side == Side::Left) return lift(op, Side::Left);
    return -lift(op, Side::Right);
}

SuperOp commutator_generator(const DenseOp& v) {
    const std::complex<double> minus_i{0.0, -1.0};
    return minus_i * (lift(v, Side::Left) - lift(v, Side::Right));
}

DenseOp apply(const SuperOp& s, const DenseOp& rho) {
    if (rho.rows() != rho.cols() || s.rows() != s.cols() || s.cols() != rho.size())
        throw std::invalid_argument("apply: super-operator and operator dimensions differ");
    return unvec(s * vec(rho), rho.rows());
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix is not square");
    return a.exp();
}

Eigen::MatrixXcd propagate_ordered(const GeneratorAt& generator_at, double t_i, double t_f,
                                   int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("propagate_ordered: n_steps must be >= 1");
    const double dt = (t_f - t_i) / n_steps;
    Eigen::MatrixXcd total;
    for (int k = 0; k < n_steps; ++k) {
        const double mid = t_i + (k + 0.5) * dt;
        Eigen::MatrixXcd step = expm(dt * generator_at(mid));
        if (k == 0) {
            total = std::move(step);
        } else {
            total = step * total;
        }
    }
    return total;
}

}  // namespace fvheat::superop
