// superop.hpp: Liouville-space algebra on column-stacked operators
//
// vec(ρ) stacks the columns of ρ, so vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ).

#pragma once

#include <functional>

#include "fvheat/types.hpp"

namespace fvheat::superop {

enum class Side { Left, Right };

bool is_hermitian(const DenseOp& op, double tol = 1e-12);

Eigen::VectorXcd vec(const DenseOp& rho);
DenseOp unvec(const Eigen::VectorXcd& v, Eigen::Index dim);

// left: ρ ↦ Aρ, right: ρ ↦ ρA (no sign).
SuperOp lift(const DenseOp& op, Side side);

// 𝒳⁺ρ = Xρ, 𝒳⁻ρ = −ρX.
SuperOp lift_signed(const DenseOp& op, Side side);

// ρ ↦ −i[V, ρ]
SuperOp commutator_generator(const DenseOp& v);

// Throws std::invalid_argument on dimension mismatch.
DenseOp apply(const SuperOp& s, const DenseOp& rho);

// e^{A} by Padé scaling and squaring.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

using GeneratorAt = std::function<Eigen::MatrixXcd(double)>;

// Chronologically ordered exponential T exp ∫ G(s) ds over [t_i, t_f], built from
// midpoint-sampled steps with the latest step leftmost. Works for any square generator,
// Liouvillians in Liouville space as well as −iH(t) in Hilbert space.
Eigen::MatrixXcd propagate_ordered(const GeneratorAt& generator_at, double t_i, double t_f,
                                   int n_steps);

}  // namespace fvheat::superop
