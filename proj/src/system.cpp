// system.cpp: SystemModel construction and density checks

#include "fvheat/system.hpp"

#include <cmath>
#include <stdexcept>

#include "fvheat/superop.hpp"

namespace fvheat {

SystemModel SystemModel::make(const DenseOp& h_s, const DenseOp& x_s) {
    if (h_s.rows() < 1 || h_s.rows() != h_s.cols())
        throw std::invalid_argument("system.h_s: must be a non-empty square matrix");
    if (x_s.rows() != h_s.rows() || x_s.cols() != h_s.cols())
        throw std::invalid_argument("system.x_s: dimension differs from h_s");
    if (!superop::is_hermitian(h_s, 1e-12)) throw std::invalid_argument("system.h_s: not Hermitian");
    if (!superop::is_hermitian(x_s, 1e-12)) throw std::invalid_argument("system.x_s: not Hermitian");

    SystemModel m;
    m.h_s = 0.5 * (h_s + h_s.adjoint());
    m.x_s = 0.5 * (x_s + x_s.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseOp> eig(m.x_s);
    if (eig.info() != Eigen::Success) throw std::runtime_error("system.x_s: diagonalization failed");
    m.x_eigenvalues = eig.eigenvalues();
    m.x_eigenbasis = eig.eigenvectors();
    const DenseOp check =
        m.x_eigenbasis.adjoint() * m.x_s * m.x_eigenbasis - DenseOp(m.x_eigenvalues.cast<cplx>().asDiagonal());
    if (check.cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("system.x_s: eigenbasis does not diagonalize x_s");
    return m;
}

SystemModel SystemModel::with_counter_term(double mu) const {
    return make(h_s + mu * x_s * x_s, x_s);
}

void validate_density(const DenseOp& rho, Eigen::Index dim) {
    if (rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("rho0: dimension differs from the system");
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > 1e-10)
        throw std::invalid_argument("rho0: trace is not 1");
    if (!superop::is_hermitian(rho, 1e-10)) throw std::invalid_argument("rho0: not Hermitian");
    Eigen::SelfAdjointEigenSolver<DenseOp> eig(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("rho0: not positive semidefinite");
}

DenseOp pauli_x() {
    DenseOp m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

DenseOp pauli_y() {
    DenseOp m(2, 2);
    m << 0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0;
    return m;
}

DenseOp pauli_z() {
    DenseOp m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

}  // namespace fvheat
