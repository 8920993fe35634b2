#pragma once

#include <Eigen/Dense>

#include "dualocp/la/pcg.hpp"
#include "dualocp/la/sparse.hpp"

namespace dualocp::la {

using DenseMat = Eigen::MatrixXd;

DenseMat to_dense(const SparseMat& a);

/// Materializes an n x n operator column by column.
DenseMat to_dense(const LinearOperator& op, std::size_t n);

/// Generalized eigenvalues of the pencil (A, B), i.e. of B^{-1}A, sorted
/// ascending. B must be SPD. Symmetric A takes the Cholesky-reduced symmetric
/// path; otherwise B^{-1}A is formed and its real parts returned (throws if an
/// eigenvalue has a non-negligible imaginary part). Throws if any eigenpair
/// residual ||Av - lambda Bv|| exceeds 1e-8 ||v|| (relative to the pencil scale).
Eigen::VectorXd dense_eig_general(const DenseMat& a, const DenseMat& b);

/// Largest singular value.
double spectral_norm(const DenseMat& a);

}  // namespace dualocp::la
