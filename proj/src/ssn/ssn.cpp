#include "dualocp/ssn/ssn.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dualocp/la/pcg.hpp"

namespace dualocp::ssn {

ActiveSets active_sets(const TimeFunction& p, double gamma, const dual::ControlBounds& bounds)
{
    ActiveSets out = p;
    for (auto& blk : out) {
        for (double& v : blk) {
            const double s = v / gamma;
            v = (s >= bounds.a && s <= bounds.b) ? 1.0 : 0.0;
        }
    }
    return out;
}

std::size_t count_differences(const ActiveSets& a, const ActiveSets& b)
{
    la::require_same_size(a.size(), b.size(), "count_differences");
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) n += a[k][i] != b[k][i] ? 1 : 0;
    }
    return n;
}

Residual residual_F(const dual::DualProblem& prob, const TimeFunction& z, const TimeFunction& p)
{
    const auto& sys = prob.system();
    Residual r;
    r.r1 = sys.apply_M(parabolic::lincomb(1.0, z, -1.0, prob.effective_target));
    parabolic::axpy(1.0, sys.apply_Kcal_transpose(p), r.r1);
    r.r2 = sys.apply_Kcal(z);
    parabolic::axpy(-1.0, sys.apply_M1(dual::project_scaled(p, prob.gamma, prob.bounds)), r.r2);
    return r;
}

double residual_norm(const TimeFunction& r2) { return la::norm2(parabolic::flatten(r2)); }

SchurOperator::SchurOperator(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active)
    : sys_(&sys), gamma_(gamma), active_(&active)
{
}

TimeFunction SchurOperator::apply(const TimeFunction& v) const
{
    TimeFunction out = sys_->apply_Kcal(sys_->apply_M_inverse(sys_->apply_Kcal_transpose(v)));
    const auto& m1 = sys_->ops().m1;
    for (std::size_t k = 0; k < v.size(); ++k) {
        for (std::size_t i = 0; i < m1.size(); ++i) out[k][i] += m1[i] * (*active_)[k][i] * v[k][i] / gamma_;
    }
    return out;
}

SchurPreconditioner::SchurPreconditioner(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active,
                                         InnerSolve inner, int vcycles)
    : sys_(&sys), inner_(inner), vcycles_(vcycles)
{
    if (vcycles_ < 1) throw std::invalid_argument("SchurPreconditioner: need at least one V-cycle");
    const auto& ops = sys.ops();
    const double inv_sqrt_gamma = 1.0 / std::sqrt(gamma);
    shifts_.resize(sys.blocks());
    blocks_.reserve(sys.blocks());
    for (std::size_t k = 0; k < sys.blocks(); ++k) {
        shifts_[k].resize(ops.size());
        for (std::size_t i = 0; i < ops.size(); ++i) {
            shifts_[k][i] = std::sqrt(ops.m[i] * ops.m1[i]) * inv_sqrt_gamma * active[k][i];
        }
        blocks_.push_back(std::make_unique<mg::ShiftedSystem>(sys.hierarchy(), shifts_[k]));
    }
}

la::Vec SchurPreconditioner::block_solve(std::size_t k, const la::Vec& b) const
{
    if (inner_ == InnerSolve::Exact) return mg::solve_shifted_block(*blocks_[k], b, 1e-14, {}, 200).x;
    return mg::vcycle(*blocks_[k], b, {}, vcycles_);
}

TimeFunction SchurPreconditioner::apply(const TimeFunction& r) const
{
    const std::size_t nb = sys_->blocks();
    const std::size_t n = sys_->space_size();
    const auto& c = sys_->coupling();
    const auto& m = sys_->ops().m;

    TimeFunction x(nb);
    la::Vec rhs(n);
    for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = r[k][i] + (k > 0 ? c[i] * x[k - 1][i] : 0.0);
        x[k] = block_solve(k, rhs);
    }
    for (auto& blk : x) {
        for (std::size_t i = 0; i < n; ++i) blk[i] *= m[i];
    }
    TimeFunction y(nb);
    for (std::size_t k = nb; k-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = x[k][i] + (k + 1 < nb ? c[i] * y[k + 1][i] : 0.0);
        y[k] = block_solve(k, rhs);
    }
    return y;
}

NewtonDirection newton_direction(const dual::DualProblem& prob, const TimeFunction& z, const TimeFunction& p,
                                 const ActiveSets& active, const SsnConfig& cfg)
{
    const auto& sys = prob.system();
    const std::size_t nb = sys.blocks();
    Residual f = residual_F(prob, z, p);

    // (a) d̄1 = M⁻¹ d1, d̂2 = d2 - Kcal d̄1 with (d1, d2) = -F
    TimeFunction d1bar = sys.apply_M_inverse(f.r1);
    for (auto& blk : d1bar) la::scale(-1.0, blk);
    TimeFunction d2hat = parabolic::lincomb(-1.0, f.r2, -1.0, sys.apply_Kcal(d1bar));

    // (b) C Δp = -d̂2
    SchurOperator schur(sys, prob.gamma, active);
    SchurPreconditioner prec(sys, prob.gamma, active, cfg.inner, cfg.vcycles);
    la::LinearOperator a_op = [&](std::span<const double> x, std::span<double> y) {
        la::Vec out = parabolic::flatten(schur.apply(parabolic::unflatten(x, nb)));
        std::copy(out.begin(), out.end(), y.begin());
    };
    la::LinearOperator p_op = [&](std::span<const double> x, std::span<double> y) {
        la::Vec out = parabolic::flatten(prec.apply(parabolic::unflatten(x, nb)));
        std::copy(out.begin(), out.end(), y.begin());
    };
    la::Vec rhs = parabolic::flatten(d2hat);
    la::scale(-1.0, rhs);
    la::PcgResult sol = la::pcg_solve(a_op, rhs, p_op, cfg.pcg_tol, cfg.pcg_max_iter);
    if (!sol.converged) {
        throw std::runtime_error("ssn: PCG did not converge in " + std::to_string(cfg.pcg_max_iter) +
                                 " iterations (relative residual " + std::to_string(sol.rel_residual) + ")");
    }

    // (c) Δz = d̄1 - M⁻¹ Kcalᵀ Δp
    NewtonDirection dir;
    dir.dp = parabolic::unflatten(sol.x, nb);
    dir.dz = parabolic::lincomb(1.0, d1bar, -1.0, sys.apply_M_inverse(sys.apply_Kcal_transpose(dir.dp)));
    dir.pcg_iters = sol.iters;
    dir.pcg_rel_residual = sol.rel_residual;
    return dir;
}

SsnReport ssn_solve(const dual::DualProblem& prob, const SsnConfig& cfg, const TimeFunction& z0, const TimeFunction& p0)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto& sys = prob.system();
    SsnReport rep;
    rep.z = z0.empty() ? parabolic::zeros(sys.blocks(), sys.space_size()) : z0;
    rep.p = p0.empty() ? parabolic::zeros(sys.blocks(), sys.space_size()) : p0;

    std::size_t total_cg = 0;
    for (std::size_t k = 0; k < cfg.max_outer; ++k) {
        const ActiveSets active = active_sets(rep.p, prob.gamma, prob.bounds);
        NewtonDirection dir;
        try {
            dir = newton_direction(prob, rep.z, rep.p, active, cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error("ssn iteration " + std::to_string(k + 1) + ": " + e.what());
        }
        parabolic::axpy(1.0, dir.dz, rep.z);
        parabolic::axpy(1.0, dir.dp, rep.p);

        SsnIterate it;
        it.residual = residual_norm(residual_F(prob, rep.z, rep.p).r2);
        it.pcg_iters = dir.pcg_iters;
        const ActiveSets next = active_sets(rep.p, prob.gamma, prob.bounds);
        it.active_changes = count_differences(active, next);
        for (const auto& blk : next) {
            for (double v : blk) it.active_count += v != 0.0 ? 1 : 0;
        }
        rep.history.push_back(it);
        rep.iterations = k + 1;
        total_cg += dir.pcg_iters;
        rep.max_cg = std::max(rep.max_cg, dir.pcg_iters);
        if (it.residual <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged) {
        throw std::runtime_error("ssn: no convergence within " + std::to_string(cfg.max_outer) +
                                 " outer iterations (last residual " + std::to_string(rep.history.back().residual) + ")");
    }
    rep.mean_cg = static_cast<double>(total_cg) / static_cast<double>(rep.iterations);
    rep.q = parabolic::lincomb(1.0, prob.effective_target, -1.0, rep.z);
    rep.primal = dual::recover_primal(prob, rep.q, rep.p);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace dualocp::ssn
