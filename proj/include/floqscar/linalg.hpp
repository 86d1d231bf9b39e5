#pragma once

#include "floqscar/basis.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace floqscar {

struct SymmetricEigen {
  Eigen::VectorXd values; ///< ascending
  Eigen::MatrixXd vectors;
};

/// Real symmetric eigendecomposition (divide and conquer LAPACK driver).
SymmetricEigen eigh(Eigen::MatrixXd a);

/// Orthonormal isometries Q_b (dim x dim_b) onto the invariant subspaces of
/// the up <-> down exchange |alpha, beta> -> |beta, alpha>. Two blocks (even,
/// odd) when n_up == n_down, otherwise a single identity block.
std::vector<Eigen::SparseMatrix<double>> spin_flip_blocks(const FockSpace& space);

/// Eigendecomposition of a real symmetric matrix that commutes with the
/// projectors Q_b Q_b^T, done block by block. Values sorted ascending.
SymmetricEigen eigh_blocked(const Eigen::MatrixXd& a,
                            const std::vector<Eigen::SparseMatrix<double>>& blocks);

struct UnitaryEigen {
  Eigen::VectorXcd values;  ///< unit-modulus eigenvalues
  Eigen::MatrixXd vectors;  ///< real orthogonal eigenvectors
};

/// Eigendecomposition of a unitary matrix that is also complex symmetric
/// (U = U^T). Re U and Im U then commute and share a real orthogonal
/// eigenbasis, found from X + cY with degenerate clusters split by Y.
UnitaryEigen diagonalize_symmetric_unitary(const Eigen::MatrixXcd& u);
/// Same, from the real and imaginary parts.
UnitaryEigen diagonalize_symmetric_unitary(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im);

/// max |(U G)_k - lambda_k G_k| over columns.
double eigen_residual(const Eigen::MatrixXcd& u, const UnitaryEigen& e);

} // namespace floqscar
