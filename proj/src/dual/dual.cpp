#include "dualocp/dual/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dualocp::dual {

void ControlBounds::validate() const
{
    if (!(a <= 0.0 && 0.0 <= b)) {
        throw std::invalid_argument("control bounds must satisfy a <= 0 <= b (got a=" + std::to_string(a) +
                                    ", b=" + std::to_string(b) + ")");
    }
}

double theta(double x, double gamma, const ControlBounds& bounds)
{
    const double s = x / gamma;
    if (s < bounds.a) return bounds.a * x - 0.5 * gamma * bounds.a * bounds.a;
    if (s > bounds.b) return bounds.b * x - 0.5 * gamma * bounds.b * bounds.b;
    return 0.5 * x * x / gamma;
}

double theta_prime(double x, double gamma, const ControlBounds& bounds) { return std::clamp(x / gamma, bounds.a, bounds.b); }

double project(double v, const ControlBounds& bounds) { return std::clamp(v, bounds.a, bounds.b); }

TimeFunction project(const TimeFunction& v, const ControlBounds& bounds)
{
    TimeFunction out = v;
    for (auto& blk : out) {
        for (double& x : blk) x = project(x, bounds);
    }
    return out;
}

TimeFunction project_scaled(const TimeFunction& p, double gamma, const ControlBounds& bounds)
{
    TimeFunction out = p;
    for (auto& blk : out) {
        for (double& x : blk) x = theta_prime(x, gamma, bounds);
    }
    return out;
}

TimeFunction effective_target(const SpaceTimeSystem& sys, const TimeFunction& y_d, std::span<const double> y0,
                              const TimeFunction& f, TimeFunction* free_response)
{
    TimeFunction y_free = sys.primal_state_sweep({}, y0, f);
    TimeFunction eff = parabolic::lincomb(1.0, y_d, -1.0, y_free);
    if (free_response) *free_response = std::move(y_free);
    return eff;
}

DualProblem make_dual_problem(const SpaceTimeSystem& sys, double gamma, ControlBounds bounds, TimeFunction y_d,
                              std::span<const double> y0, const TimeFunction& f)
{
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    bounds.validate();
    DualProblem prob;
    prob.sys = &sys;
    prob.gamma = gamma;
    prob.bounds = bounds;
    prob.effective_target = effective_target(sys, y_d, y0, f, &prob.free_response);
    prob.target = std::move(y_d);
    return prob;
}

double objective(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p)
{
    const auto& sys = prob.system();
    const auto& m1 = sys.ops().m1;
    double th = 0.0;
    for (const auto& blk : p) {
        for (std::size_t i = 0; i < blk.size(); ++i) {
            if (m1[i] != 0.0) th += m1[i] * theta(blk[i], prob.gamma, prob.bounds);
        }
    }
    return sys.time_weight() * th - sys.inner(q, prob.effective_target) + 0.5 * sys.inner(q, q);
}

double objective_four_term(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p)
{
    const auto& sys = prob.system();
    const TimeFunction w = project_scaled(p, prob.gamma, prob.bounds);
    return sys.inner_m1(p, w) - 0.5 * prob.gamma * sys.inner_m1(w, w) - sys.inner(q, prob.effective_target) +
           0.5 * sys.inner(q, q);
}

GradientResult gradient(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p)
{
    GradientResult r;
    r.z = prob.system().adjoint_sweep(project_scaled(p, prob.gamma, prob.bounds));
    r.g = parabolic::lincomb(1.0, r.z, -1.0, prob.effective_target);
    parabolic::axpy(1.0, q, r.g);
    return r;
}

GradientResult gradient(const DualProblem& prob, const TimeFunction& q)
{
    return gradient(prob, q, prob.system().dual_state_sweep(q));
}

TimeFunction ObjectiveCache::at(double rho) const { return parabolic::lincomb(1.0, p_q, rho, p_d); }

double quadratic_model_step(const DualProblem& prob, const TimeFunction& d, double slope, const ObjectiveCache& cache)
{
    const auto& sys = prob.system();
    const auto& m1 = sys.ops().m1;
    double curv_theta = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        for (std::size_t i = 0; i < m1.size(); ++i) {
            const double s = cache.p_q[k][i] / prob.gamma;
            if (s >= prob.bounds.a && s <= prob.bounds.b) curv_theta += m1[i] * cache.p_d[k][i] * cache.p_d[k][i];
        }
    }
    const double curv = sys.norm_sq(d) + sys.time_weight() * curv_theta / prob.gamma;
    return curv > 0.0 ? -slope / curv : 1.0;
}

ArmijoResult armijo_search(const DualProblem& prob, const TimeFunction& q, double j_q, const TimeFunction& g,
                           const TimeFunction& d, ObjectiveCache& cache, const ArmijoOptions& opts)
{
    const auto& sys = prob.system();
    const double slope = sys.inner(g, d);
    if (!(slope < 0.0)) throw std::invalid_argument("armijo_search: d is not a descent direction");

    cache.p_d = sys.dual_state_sweep(d);
    double rho = opts.rho_init > 0.0 ? opts.rho_init : quadratic_model_step(prob, d, slope, cache);

    ArmijoResult res;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
        TimeFunction p = cache.at(rho);
        TimeFunction qt = parabolic::lincomb(1.0, q, rho, d);
        const double j = objective(prob, qt, p);
        if (j <= j_q + opts.c * rho * slope) {
            res.rho = rho;
            res.j_new = j;
            res.backtracks = bt;
            res.p_new = std::move(p);
            return res;
        }
        rho *= opts.backtrack;
    }
    throw std::runtime_error("armijo_search: no acceptable step after " + std::to_string(opts.max_backtracks) +
                             " backtracks (slope " + std::to_string(slope) + ")");
}

PrimalPair recover_primal(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p)
{
    PrimalPair out;
    out.u = project_scaled(p, prob.gamma, prob.bounds);
    const auto& m1 = prob.system().ops().m1;
    for (auto& blk : out.u) {
        for (std::size_t i = 0; i < blk.size(); ++i) {
            if (m1[i] == 0.0) blk[i] = 0.0;
        }
    }
    out.y = parabolic::lincomb(1.0, prob.target, -1.0, q);
    return out;
}

double primal_objective(const DualProblem& prob, const TimeFunction& u)
{
    const auto& sys = prob.system();
    TimeFunction y = sys.primal_state_sweep(u, {}, {});
    parabolic::axpy(1.0, prob.free_response, y);
    parabolic::axpy(-1.0, prob.target, y);
    return 0.5 * sys.norm_sq(y) + 0.5 * prob.gamma * sys.inner_m1(u, u);
}

}  // namespace dualocp::dual
