#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "dualocp/dual/dual.hpp"
#include "dualocp/fem/mesh.hpp"

namespace dualocp::problems {

using parabolic::TimeFunction;

/// A benchmark instance ready for either solver.
///
/// Parabolic instances use the interior-slice layout: with N = T/dt steps the
/// unknown slices are t_1, ..., t_{N-1} (block k <-> t_{k+1}); the state at t_0
/// is the initial value and the dual state vanishes at t_N. Data are sampled
/// nodally at the slice times. A stationary instance is a single block with
/// unit time weight.
struct Problem {
    std::string name;
    int level = 0;
    double gamma = 0.0;
    bool stationary = false;
    std::size_t steps = 0;  // N (1 for stationary)
    fem::SpaceMesh mesh;
    std::unique_ptr<parabolic::SpaceTimeSystem> sys;
    dual::DualProblem dual;

    /// y0 and y_d(t_0): the known first slice entering Obj/RelDis.
    la::Vec initial_state;
    la::Vec initial_target;

    /// Exact (u*, y*) sampled at the unknown slices, when known.
    std::optional<TimeFunction> u_star;
    std::optional<TimeFunction> y_star;

    /// Default stopping tolerance for semismooth Newton on this instance.
    double ssn_tol = 1e-4;
    double ssn_pcg_tol = 1e-6;

    Problem() = default;
    Problem(Problem&&) = default;
    Problem& operator=(Problem&&) = default;
};

/// y* = (1-t) sin πx₁ sin πx₂, p* = γ(1-t) sin 2πx₁ sin 2πx₂, u* = clamp(-p*/γ, -0.5, 0.5),
/// f = -u* + y*_t - Δy*, y_d = y* + p*_t + Δp*, y(0) = sin πx₁ sin πx₂, O = Ω.
/// steps = 0 selects N = 2^level.
Problem build_example1(double gamma, int level, std::size_t steps = 0);

/// y_t - Δy + y = u χ_O, O = (0, 0.25)², y_d = e^t sin πx₁ sin πx₂, y(0) = sin πx₁ sin πx₂,
/// bounds [-300, 300].
Problem build_example2(double gamma, int level, std::size_t steps = 0,
                       fem::ControlMassRule rule = fem::ControlMassRule::NodalMask);

/// Elliptic: -Δy = u, bounds [-0.3, 1], r = clamp(2 sin πx₁ sin πx₂), y_r = K⁻¹ M r,
/// y_d = 4π²γ sin πx₁ sin πx₂ + y_r, u* = r.
Problem build_example3(double gamma, int level);

struct CustomSpec {
    double gamma = 1e-3;
    int level = 4;
    std::size_t steps = 0;
    double T = 1.0;
    double nu = 1.0;
    double a0 = 0.0;
    double a = -1.0;
    double b = 1.0;
    fem::ControlBox control;
    /// y_d = target_amp * exp(target_rate t) sin πx₁ sin πx₂
    double target_amp = 1.0;
    double target_rate = 0.0;
    /// y0 = y0_amp sin πx₁ sin πx₂
    double y0_amp = 0.0;
};

Problem build_custom(const CustomSpec& spec);

struct Metrics {
    double obj = 0.0;
    double reldis = 0.0;
};

/// Obj = ½||y - y_d||² + γ/2 ||u||²_O and RelDis = ||y - y_d||²/||y_d||² in the
/// discrete time-space norms; the parabolic sums include the initial slice.
/// For the stationary instance RelDis is the unsquared ratio.
Metrics metrics(const Problem& prob, const dual::PrimalPair& primal);

struct ErrorNorms {
    double err_u = 0.0;
    double err_y = 0.0;
};

/// Discrete L² errors over the unknown slices (u weighted by M1, y by M).
/// Throws if the instance has no exact solution.
ErrorNorms error_norms(const Problem& prob, const dual::PrimalPair& primal);

/// One record per line: time-index node-index x1 x2 value.
void dump_field(const Problem& prob, const TimeFunction& field, std::ostream& os);

}  // namespace dualocp::problems
