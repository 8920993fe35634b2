#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "dualocp/la/sparse.hpp"
#include "dualocp/la/vec.hpp"

namespace dualocp::la {

/// y = Op(x); y has the same length as x.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

LinearOperator as_operator(const SparseMat& a);
LinearOperator identity_operator();

struct PcgResult {
    Vec x;
    std::size_t iters = 0;
    bool converged = false;
    double rel_residual = 0.0;
};

/// Preconditioned CG from x0 = 0. Stops when the recursively updated residual
/// satisfies ||r|| <= tol * ||b||. Throws std::runtime_error on breakdown
/// (curvature d^T A d <= 1e-300) naming the iteration.
PcgResult pcg_solve(const LinearOperator& a, std::span<const double> b, const LinearOperator& precond, double tol,
                    std::size_t max_iter);

}  // namespace dualocp::la
