#include "dualocp/la/pcg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualocp::la {

LinearOperator as_operator(const SparseMat& a)
{
    return [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); };
}

LinearOperator identity_operator()
{
    return [](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
}

PcgResult pcg_solve(const LinearOperator& a, std::span<const double> b, const LinearOperator& precond, double tol,
                    std::size_t max_iter)
{
    const std::size_t n = b.size();
    PcgResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    Vec r(b.begin(), b.end());
    Vec z(n), d(n), ad(n);
    precond(r, z);
    d = z;
    double rz = dot(r, z);

    for (std::size_t k = 0; k < max_iter; ++k) {
        a(d, ad);
        const double curv = dot(d, ad);
        if (!(curv > 1e-300)) {
            throw std::runtime_error("pcg: breakdown at iteration " + std::to_string(k + 1) +
                                     " (curvature " + std::to_string(curv) + ")");
        }
        const double alpha = rz / curv;
        axpy(alpha, d, res.x);
        axpy(-alpha, ad, r);
        res.iters = k + 1;
        res.rel_residual = norm2(r) / bnorm;
        if (!std::isfinite(res.rel_residual)) throw std::runtime_error("pcg: non-finite residual at iteration " + std::to_string(k + 1));
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        precond(r, z);
        const double rz_new = dot(r, z);
        xpby(z, rz_new / rz, d);
        rz = rz_new;
    }
    return res;
}

}  // namespace dualocp::la
