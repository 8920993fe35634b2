#pragma once

#include <cstddef>
#include <span>

#include "dualocp/parabolic/space_time.hpp"

namespace dualocp::dual {

using parabolic::SpaceTimeSystem;
using parabolic::TimeFunction;

struct ControlBounds {
    double a = -1.0;
    double b = 1.0;

    /// Throws unless a <= 0 <= b.
    void validate() const;
};

double theta(double x, double gamma, const ControlBounds& bounds);
/// theta'(x) = clamp(x / gamma, a, b)
double theta_prime(double x, double gamma, const ControlBounds& bounds);

double project(double v, const ControlBounds& bounds);
TimeFunction project(const TimeFunction& v, const ControlBounds& bounds);
/// clamp(p / gamma, a, b), blockwise
TimeFunction project_scaled(const TimeFunction& p, double gamma, const ControlBounds& bounds);

/// The discrete dual problem min_q J(q) on a fixed space-time system.
/// `target` is the original y_d; `free_response` the state driven by y0 and f
/// alone. The dual works with y_d - free_response.
struct DualProblem {
    const SpaceTimeSystem* sys = nullptr;
    double gamma = 1.0;
    ControlBounds bounds;
    TimeFunction target;
    TimeFunction free_response;
    TimeFunction effective_target;

    [[nodiscard]] const SpaceTimeSystem& system() const { return *sys; }
};

/// y_free = primal_state_sweep(0, y0, f); y_d_eff = y_d - y_free.
TimeFunction effective_target(const SpaceTimeSystem& sys, const TimeFunction& y_d, std::span<const double> y0,
                              const TimeFunction& f, TimeFunction* free_response = nullptr);

DualProblem make_dual_problem(const SpaceTimeSystem& sys, double gamma, ControlBounds bounds, TimeFunction y_d,
                              std::span<const double> y0, const TimeFunction& f);

/// J(q) in the theta form, given p = S*(q).
double objective(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p);

/// J(q) from the four-term definition <p, Pr(p/γ)> - γ/2 ||Pr(p/γ)||² - <q, y_d> + ½||q||².
double objective_four_term(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p);

struct GradientResult {
    TimeFunction g;
    TimeFunction z;
};

/// g = z - y_d_eff + q with z = adjoint_sweep(Pr(p/γ)); p = S*(q) must be supplied.
GradientResult gradient(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p);
/// Convenience overload performing the dual sweep.
GradientResult gradient(const DualProblem& prob, const TimeFunction& q);

/// p(ρ) = p_q + ρ p_d for the line q + ρ d.
struct ObjectiveCache {
    TimeFunction p_q;
    TimeFunction p_d;

    [[nodiscard]] TimeFunction at(double rho) const;
};

struct ArmijoOptions {
    double c = 0.4;
    /// Initial trial step; a non-positive value selects the minimizer of the
    /// quadratic model along d.
    double rho_init = 0.0;
    double backtrack = 0.5;
    int max_backtracks = 60;
};

struct ArmijoResult {
    double rho = 0.0;
    double j_new = 0.0;
    int backtracks = 0;
    TimeFunction p_new;
};

/// Minimizer of the local quadratic model of J along d, using the active
/// pattern of p_q. Requires cache.p_d to be filled.
double quadratic_model_step(const DualProblem& prob, const TimeFunction& d, double slope, const ObjectiveCache& cache);

/// Armijo backtracking along d. Fills cache.p_d with the single dual sweep of
/// the call; cache.p_q must hold S*(q). Throws after max_backtracks failures
/// or when d is not a descent direction.
ArmijoResult armijo_search(const DualProblem& prob, const TimeFunction& q, double j_q, const TimeFunction& g,
                           const TimeFunction& d, ObjectiveCache& cache, const ArmijoOptions& opts);

struct PrimalPair {
    TimeFunction u;
    TimeFunction y;
};

/// ū = Pr(p̄/γ) (zero off the control region), ȳ = y_d - q̄.
PrimalPair recover_primal(const DualProblem& prob, const TimeFunction& q, const TimeFunction& p);

/// ½||y(u) - y_d||²_dt + γ/2 ||u||²_{M1,dt} with y(u) from an independent
/// primal sweep including the free response.
double primal_objective(const DualProblem& prob, const TimeFunction& u);

}  // namespace dualocp::dual
