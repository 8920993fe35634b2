#include "dualocp/problems/problems.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "dualocp/la/pcg.hpp"

namespace dualocp::problems {

namespace {

using std::numbers::pi;
using NodalFn = std::function<double(double x1, double x2, double t)>;

la::Vec sample(const fem::SpaceMesh& mesh, const NodalFn& fn, double t)
{
    la::Vec v(mesh.num_interior());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& x = mesh.nodes[mesh.interior_nodes[i]];
        v[i] = fn(x[0], x[1], t);
    }
    return v;
}

/// Slices t_1..t_{N-1}.
TimeFunction sample_slices(const fem::SpaceMesh& mesh, const NodalFn& fn, std::size_t steps, double dt)
{
    TimeFunction out(steps - 1);
    for (std::size_t k = 0; k + 1 < steps; ++k) out[k] = sample(mesh, fn, static_cast<double>(k + 1) * dt);
    return out;
}

double sin_sin(double x1, double x2) { return std::sin(pi * x1) * std::sin(pi * x2); }
double sin2_sin2(double x1, double x2) { return std::sin(2 * pi * x1) * std::sin(2 * pi * x2); }

struct ParabolicSetup {
    double T = 1.0;
    double nu = 1.0;
    double a0 = 0.0;
    dual::ControlBounds bounds;
    fem::ControlBox control;
    fem::ControlMassRule rule = fem::ControlMassRule::NodalMask;
    NodalFn target;
    NodalFn source;  // may be empty
    NodalFn initial;
};

Problem build_parabolic(std::string name, double gamma, int level, std::size_t steps, const ParabolicSetup& s)
{
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (level < 1 || level > 8) throw std::invalid_argument("level must lie in [1, 8]");
    if (steps == 0) steps = std::size_t{1} << level;
    if (steps < 2) throw std::invalid_argument("need at least 2 time steps (one unknown slice)");

    Problem p;
    p.name = std::move(name);
    p.level = level;
    p.gamma = gamma;
    p.steps = steps;
    p.mesh = fem::build_mesh(level, s.control);
    const double dt = s.T / static_cast<double>(steps);
    auto ops = fem::build_space_operators(p.mesh, dt, s.nu, s.a0, s.rule);
    p.sys = std::make_unique<parabolic::SpaceTimeSystem>(std::move(ops), level, steps - 1, dt);

    TimeFunction y_d = sample_slices(p.mesh, s.target, steps, dt);
    TimeFunction f = s.source ? sample_slices(p.mesh, s.source, steps, dt) : TimeFunction{};
    p.initial_state = sample(p.mesh, s.initial, 0.0);
    p.initial_target = sample(p.mesh, s.target, 0.0);
    p.dual = dual::make_dual_problem(*p.sys, gamma, s.bounds, std::move(y_d), p.initial_state, f);
    return p;
}

}  // namespace

Problem build_example1(double gamma, int level, std::size_t steps)
{
    ParabolicSetup s;
    s.bounds = {-0.5, 0.5};
    const double a = s.bounds.a, b = s.bounds.b;
    auto y_star = [](double x1, double x2, double t) { return (1 - t) * sin_sin(x1, x2); };
    auto u_star = [a, b](double x1, double x2, double t) { return std::clamp(-(1 - t) * sin2_sin2(x1, x2), a, b); };
    // y*_t = -sin sin, Δy* = -2π² y*
    s.source = [u_star](double x1, double x2, double t) {
        return -u_star(x1, x2, t) - sin_sin(x1, x2) + 2 * pi * pi * (1 - t) * sin_sin(x1, x2);
    };
    // p*_t = -γ sin2 sin2, Δp* = -8π² p*
    s.target = [gamma](double x1, double x2, double t) {
        return (1 - t) * sin_sin(x1, x2) - gamma * sin2_sin2(x1, x2) - 8 * pi * pi * gamma * (1 - t) * sin2_sin2(x1, x2);
    };
    s.initial = [](double x1, double x2, double) { return sin_sin(x1, x2); };

    Problem p = build_parabolic("example1", gamma, level, steps, s);
    const double dt = 1.0 / static_cast<double>(p.steps);
    p.u_star = sample_slices(p.mesh, u_star, p.steps, dt);
    p.y_star = sample_slices(p.mesh, y_star, p.steps, dt);
    return p;
}

Problem build_example2(double gamma, int level, std::size_t steps, fem::ControlMassRule rule)
{
    ParabolicSetup s;
    s.a0 = 1.0;
    s.bounds = {-300.0, 300.0};
    s.control = {0.0, 0.25, 0.0, 0.25};
    s.rule = rule;
    s.target = [](double x1, double x2, double t) { return std::exp(t) * sin_sin(x1, x2); };
    s.initial = [](double x1, double x2, double) { return sin_sin(x1, x2); };
    return build_parabolic("example2", gamma, level, steps, s);
}

Problem build_custom(const CustomSpec& c)
{
    ParabolicSetup s;
    s.T = c.T;
    s.nu = c.nu;
    s.a0 = c.a0;
    s.bounds = {c.a, c.b};
    s.control = c.control;
    const double amp = c.target_amp, rate = c.target_rate, y0 = c.y0_amp;
    s.target = [amp, rate](double x1, double x2, double t) { return amp * std::exp(rate * t) * sin_sin(x1, x2); };
    s.initial = [y0](double x1, double x2, double) { return y0 * sin_sin(x1, x2); };
    return build_parabolic("custom", c.gamma, c.level, c.steps, s);
}

Problem build_example3(double gamma, int level)
{
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (level < 1 || level > 8) throw std::invalid_argument("level must lie in [1, 8]");
    const dual::ControlBounds bounds{-0.3, 1.0};

    Problem p;
    p.name = "example3";
    p.level = level;
    p.gamma = gamma;
    p.stationary = true;
    p.steps = 1;
    p.ssn_tol = 1e-8;
    p.ssn_pcg_tol = 1e-8;
    p.mesh = fem::build_mesh(level);
    auto ops = fem::build_space_operators(p.mesh, 0.0, 1.0, 0.0);
    p.sys = std::make_unique<parabolic::SpaceTimeSystem>(std::move(ops), level, 1, 1.0, 1e-13);

    auto r_fn = [bounds](double x1, double x2, double) { return std::clamp(2 * sin_sin(x1, x2), bounds.a, bounds.b); };
    const la::Vec r = sample(p.mesh, r_fn, 0.0);
    la::Vec rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = p.sys->ops().m[i] * r[i];
    const la::Vec y_r = p.sys->solve_khat(rhs);

    la::Vec y_d = sample(p.mesh, [gamma](double x1, double x2, double) { return 4 * pi * pi * gamma * sin_sin(x1, x2); }, 0.0);
    la::axpy(1.0, y_r, y_d);
    p.dual = dual::make_dual_problem(*p.sys, gamma, bounds, TimeFunction{y_d}, {}, {});
    p.u_star = TimeFunction{r};
    p.y_star = TimeFunction{y_r};
    return p;
}

Metrics metrics(const Problem& prob, const dual::PrimalPair& primal)
{
    const auto& sys = *prob.sys;
    const TimeFunction diff = parabolic::lincomb(1.0, primal.y, -1.0, prob.dual.target);
    double num = sys.norm_sq(diff);
    double den = sys.norm_sq(prob.dual.target);
    if (!prob.stationary) {
        const auto& m = sys.ops().m;
        la::Vec d0 = prob.initial_state;
        la::axpy(-1.0, prob.initial_target, d0);
        num += sys.time_weight() * la::weighted_dot(m, d0, d0);
        den += sys.time_weight() * la::weighted_dot(m, prob.initial_target, prob.initial_target);
    }
    Metrics out;
    out.obj = 0.5 * num + 0.5 * prob.gamma * sys.inner_m1(primal.u, primal.u);
    out.reldis = den > 0.0 ? num / den : 0.0;
    if (prob.stationary) out.reldis = std::sqrt(out.reldis);
    return out;
}

ErrorNorms error_norms(const Problem& prob, const dual::PrimalPair& primal)
{
    if (!prob.u_star || !prob.y_star) throw std::invalid_argument(prob.name + " has no known exact solution");
    const auto& sys = *prob.sys;
    const TimeFunction du = parabolic::lincomb(1.0, primal.u, -1.0, *prob.u_star);
    const TimeFunction dy = parabolic::lincomb(1.0, primal.y, -1.0, *prob.y_star);
    return {std::sqrt(sys.inner_m1(du, du)), std::sqrt(sys.norm_sq(dy))};
}

void dump_field(const Problem& prob, const TimeFunction& field, std::ostream& os)
{
    for (std::size_t k = 0; k < field.size(); ++k) {
        // block k holds slice t_{k+1} in the parabolic layout
        const std::size_t t_index = prob.stationary ? 0 : k + 1;
        for (std::size_t i = 0; i < field[k].size(); ++i) {
            const auto& x = prob.mesh.nodes[prob.mesh.interior_nodes[i]];
            os << t_index << ' ' << prob.mesh.interior_nodes[i] << ' ' << x[0] << ' ' << x[1] << ' ' << field[k][i] << '\n';
        }
    }
}

}  // namespace dualocp::problems
