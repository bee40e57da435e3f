// system.hpp: Finite-dimensional open system: Hamiltonian plus coupling operator

#pragma once

#include "fvheat/types.hpp"

namespace fvheat {

// H_S and the coupling operator X_S, with X_S diagonalized once. Path coordinates are
// indices into x_eigenvalues; x_eigenbasis holds the eigenvectors as columns.
struct SystemModel {
    DenseOp h_s;
    DenseOp x_s;
    Eigen::VectorXd x_eigenvalues;
    DenseOp x_eigenbasis;

    // Validates Hermiticity (1e-12) and diagonalizes x_s. Throws std::invalid_argument.
    static SystemModel make(const DenseOp& h_s, const DenseOp& x_s);

    Eigen::Index dim() const { return h_s.rows(); }

    // Same model with μ X_S² added to H_S (Caldeira-Leggett counter-term).
    SystemModel with_counter_term(double mu) const;
};

// Unit trace (1e-10), Hermitian (1e-10) and no eigenvalue below −1e-10.
void validate_density(const DenseOp& rho, Eigen::Index dim);

DenseOp pauli_x();
DenseOp pauli_y();
DenseOp pauli_z();

}  // namespace fvheat
