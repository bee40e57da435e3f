// types.hpp: Shared scalar, operator and branch types

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fvheat {

using cplx = std::complex<double>;

using DenseOp = Eigen::MatrixXcd;
using SuperOp = Eigen::MatrixXcd;

// Branch label of a super-operator: + acts from the left of ρ, − from the right.
enum class Branch { Plus, Minus };

inline char branch_symbol(Branch d) { return d == Branch::Plus ? '+' : '-'; }

}  // namespace fvheat
