#include "dualocp/parabolic/space_time.hpp"

#include <stdexcept>
#include <string>

namespace dualocp::parabolic {

TimeGrid make_time_grid(double T, std::size_t N)
{
    if (N < 1 || !(T > 0.0)) throw std::invalid_argument("make_time_grid: need T > 0 and N >= 1");
    return {T, N, T / static_cast<double>(N)};
}

TimeFunction zeros(std::size_t blocks, std::size_t n) { return TimeFunction(blocks, la::Vec(n, 0.0)); }

la::Vec flatten(const TimeFunction& v)
{
    la::Vec out;
    for (const auto& b : v) out.insert(out.end(), b.begin(), b.end());
    return out;
}

TimeFunction unflatten(std::span<const double> flat, std::size_t blocks)
{
    if (blocks == 0 || flat.size() % blocks != 0) throw std::invalid_argument("unflatten: size not divisible by block count");
    const std::size_t n = flat.size() / blocks;
    TimeFunction out(blocks);
    for (std::size_t k = 0; k < blocks; ++k) out[k].assign(flat.begin() + static_cast<std::ptrdiff_t>(k * n),
                                                           flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    return out;
}

void axpy(double alpha, const TimeFunction& x, TimeFunction& y)
{
    la::require_same_size(x.size(), y.size(), "TimeFunction axpy");
    for (std::size_t k = 0; k < x.size(); ++k) la::axpy(alpha, x[k], y[k]);
}

TimeFunction lincomb(double alpha, const TimeFunction& x, double beta, const TimeFunction& y)
{
    la::require_same_size(x.size(), y.size(), "TimeFunction lincomb");
    TimeFunction out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        la::require_same_size(x[k].size(), y[k].size(), "TimeFunction lincomb block");
        out[k].resize(x[k].size());
        for (std::size_t i = 0; i < x[k].size(); ++i) out[k][i] = alpha * x[k][i] + beta * y[k][i];
    }
    return out;
}

SpaceTimeSystem::SpaceTimeSystem(fem::SpaceOperators ops, int level, std::size_t blocks, double time_weight,
                                 double sweep_tol)
    : ops_(std::move(ops)), level_(level), blocks_(blocks), time_weight_(time_weight), sweep_tol_(sweep_tol)
{
    if (blocks_ < 1) throw std::invalid_argument("SpaceTimeSystem: need at least one time block");
    if (!(time_weight_ > 0.0)) throw std::invalid_argument("SpaceTimeSystem: time weight must be positive");
    coupling_ = ops_.m;
    la::scale(ops_.dt > 0.0 ? 1.0 / ops_.dt : 0.0, coupling_);
    hierarchy_ = std::make_shared<mg::MgHierarchy>(level_, ops_.nu, ops_.mass_density());
    if (hierarchy_->size() != ops_.size()) throw std::invalid_argument("SpaceTimeSystem: level does not match operators");
    khat_system_ = std::make_shared<mg::ShiftedSystem>(*hierarchy_, std::span<const double>{});
}

void SpaceTimeSystem::check(const TimeFunction& v, const char* what) const
{
    la::require_same_size(v.size(), blocks_, what);
    for (const auto& b : v) la::require_same_size(b.size(), ops_.size(), what);
}

la::Vec SpaceTimeSystem::solve_khat(std::span<const double> b, std::span<const double> x0) const
{
    auto res = mg::solve_shifted_block(*khat_system_, b, sweep_tol_, x0, 60);
    if (!res.converged) {
        throw std::runtime_error("K̂ solve did not reach tolerance (relative residual " +
                                 std::to_string(res.rel_residual) + ")");
    }
    return std::move(res.x);
}

TimeFunction SpaceTimeSystem::dual_state_sweep(const TimeFunction& q) const
{
    check(q, "dual_state_sweep");
    ++dual_sweeps_;
    const std::size_t n = ops_.size();
    TimeFunction p(blocks_);
    la::Vec rhs(n);
    for (std::size_t k = blocks_; k-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = ops_.m[i] * q[k][i] + (k + 1 < blocks_ ? coupling_[i] * p[k + 1][i] : 0.0);
        }
        try {
            p[k] = solve_khat(rhs);
        } catch (const std::exception& e) {
            throw std::runtime_error("dual_state_sweep step " + std::to_string(k) + ": " + e.what());
        }
    }
    return p;
}

TimeFunction SpaceTimeSystem::adjoint_sweep(const TimeFunction& w) const
{
    check(w, "adjoint_sweep");
    ++adjoint_sweeps_;
    const std::size_t n = ops_.size();
    TimeFunction z(blocks_);
    la::Vec rhs(n);
    for (std::size_t k = 0; k < blocks_; ++k) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = ops_.m1[i] * w[k][i] + (k > 0 ? coupling_[i] * z[k - 1][i] : 0.0);
        try {
            z[k] = solve_khat(rhs);
        } catch (const std::exception& e) {
            throw std::runtime_error("adjoint_sweep step " + std::to_string(k) + ": " + e.what());
        }
    }
    return z;
}

TimeFunction SpaceTimeSystem::primal_state_sweep(const TimeFunction& u, std::span<const double> y0,
                                                 const TimeFunction& f) const
{
    if (!u.empty()) check(u, "primal_state_sweep control");
    if (!f.empty()) check(f, "primal_state_sweep source");
    if (!y0.empty()) la::require_same_size(y0.size(), ops_.size(), "primal_state_sweep initial state");
    const std::size_t n = ops_.size();
    TimeFunction y(blocks_);
    la::Vec rhs(n);
    for (std::size_t k = 0; k < blocks_; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            if (!u.empty()) r += ops_.m1[i] * u[k][i];
            if (!f.empty()) r += ops_.m[i] * f[k][i];
            if (k > 0) {
                r += coupling_[i] * y[k - 1][i];
            } else if (!y0.empty()) {
                r += coupling_[i] * y0[i];
            }
            rhs[i] = r;
        }
        try {
            y[k] = solve_khat(rhs);
        } catch (const std::exception& e) {
            throw std::runtime_error("primal_state_sweep step " + std::to_string(k) + ": " + e.what());
        }
    }
    return y;
}

TimeFunction SpaceTimeSystem::apply_Kcal(const TimeFunction& v) const
{
    check(v, "apply_Kcal");
    TimeFunction out(blocks_, la::Vec(ops_.size()));
    for (std::size_t k = 0; k < blocks_; ++k) {
        ops_.khat.multiply(v[k], out[k]);
        if (k > 0) {
            for (std::size_t i = 0; i < ops_.size(); ++i) out[k][i] -= coupling_[i] * v[k - 1][i];
        }
    }
    return out;
}

TimeFunction SpaceTimeSystem::apply_Kcal_transpose(const TimeFunction& v) const
{
    check(v, "apply_Kcal_transpose");
    TimeFunction out(blocks_, la::Vec(ops_.size()));
    for (std::size_t k = 0; k < blocks_; ++k) {
        ops_.khat.multiply_transpose(v[k], out[k]);
        if (k + 1 < blocks_) {
            for (std::size_t i = 0; i < ops_.size(); ++i) out[k][i] -= coupling_[i] * v[k + 1][i];
        }
    }
    return out;
}

namespace {

TimeFunction scale_blocks(const TimeFunction& v, const la::Vec& d, bool invert)
{
    TimeFunction out = v;
    for (auto& b : out) {
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = invert ? b[i] / d[i] : b[i] * d[i];
    }
    return out;
}

}  // namespace

TimeFunction SpaceTimeSystem::apply_M(const TimeFunction& v) const
{
    check(v, "apply_M");
    return scale_blocks(v, ops_.m, false);
}

TimeFunction SpaceTimeSystem::apply_M1(const TimeFunction& v) const
{
    check(v, "apply_M1");
    return scale_blocks(v, ops_.m1, false);
}

TimeFunction SpaceTimeSystem::apply_M_inverse(const TimeFunction& v) const
{
    check(v, "apply_M_inverse");
    return scale_blocks(v, ops_.m, true);
}

double SpaceTimeSystem::inner(const TimeFunction& u, const TimeFunction& v) const
{
    check(u, "inner");
    check(v, "inner");
    double s = 0.0;
    for (std::size_t k = 0; k < blocks_; ++k) s += la::weighted_dot(ops_.m, u[k], v[k]);
    return time_weight_ * s;
}

double SpaceTimeSystem::inner_m1(const TimeFunction& u, const TimeFunction& v) const
{
    check(u, "inner_m1");
    check(v, "inner_m1");
    double s = 0.0;
    for (std::size_t k = 0; k < blocks_; ++k) s += la::weighted_dot(ops_.m1, u[k], v[k]);
    return time_weight_ * s;
}

}  // namespace dualocp::parabolic
