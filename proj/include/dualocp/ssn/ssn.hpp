#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "dualocp/dual/dual.hpp"
#include "dualocp/multigrid/multigrid.hpp"

namespace dualocp::ssn {

using parabolic::SpaceTimeSystem;
using parabolic::TimeFunction;

/// Per-slice binary diagonal: 1 where a <= p/γ <= b.
using ActiveSets = TimeFunction;

ActiveSets active_sets(const TimeFunction& p, double gamma, const dual::ControlBounds& bounds);
std::size_t count_differences(const ActiveSets& a, const ActiveSets& b);

enum class InnerSolve { VCycles, Exact };

struct SsnConfig {
    double tol = 1e-4;
    double pcg_tol = 1e-6;
    std::size_t pcg_max_iter = 500;
    std::size_t max_outer = 50;
    int vcycles = 2;
    InnerSolve inner = InnerSolve::VCycles;
};

struct Residual {
    TimeFunction r1;  // M(z - y_d) + Kcalᵀ p
    TimeFunction r2;  // Kcal z - M1 Pr(p/γ)
};

Residual residual_F(const dual::DualProblem& prob, const TimeFunction& z, const TimeFunction& p);
double residual_norm(const TimeFunction& r2);

/// Applies C = M1 Π/γ + Kcal M⁻¹ Kcalᵀ.
class SchurOperator {
public:
    SchurOperator(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active);
    [[nodiscard]] TimeFunction apply(const TimeFunction& v) const;

private:
    const SpaceTimeSystem* sys_;
    double gamma_;
    const ActiveSets* active_;
};

/// x = ℂ⁻¹ r with ℂ = (Kcal + SΠ) M⁻¹ (Kcal + SΠ)ᵀ and S = M^{1/2} M1^{1/2} / √γ,
/// applied as a block forward sweep, a multiply by M, and a block backward
/// sweep. Each diagonal block K̂ + SΠ_k is inverted by a fixed number of
/// V-cycles from zero (or to round-off in Exact mode), so the operator is
/// linear and symmetric.
class SchurPreconditioner {
public:
    SchurPreconditioner(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active, InnerSolve inner,
                        int vcycles);
    [[nodiscard]] TimeFunction apply(const TimeFunction& r) const;
    /// Block shift S Π_k.
    [[nodiscard]] const la::Vec& shift(std::size_t k) const { return shifts_[k]; }

private:
    [[nodiscard]] la::Vec block_solve(std::size_t k, const la::Vec& b) const;

    const SpaceTimeSystem* sys_;
    InnerSolve inner_;
    int vcycles_;
    std::vector<la::Vec> shifts_;
    std::vector<std::unique_ptr<mg::ShiftedSystem>> blocks_;
};

struct NewtonDirection {
    TimeFunction dz;
    TimeFunction dp;
    std::size_t pcg_iters = 0;
    double pcg_rel_residual = 0.0;
};

/// Solves F'(z,p) Δ = -F(z,p) for the active sets `active` by block
/// elimination and PCG on the Schur complement. Throws if PCG does not reach
/// cfg.pcg_tol within cfg.pcg_max_iter iterations.
NewtonDirection newton_direction(const dual::DualProblem& prob, const TimeFunction& z, const TimeFunction& p,
                                 const ActiveSets& active, const SsnConfig& cfg);

struct SsnIterate {
    double residual = 0.0;        // ||Kcal z - M1 Pr(p/γ)||_2 after the step
    std::size_t pcg_iters = 0;
    std::size_t active_changes = 0;  // |Π(p_new) xor Π_k|
    std::size_t active_count = 0;
};

struct SsnReport {
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<SsnIterate> history;
    double mean_cg = 0.0;
    std::size_t max_cg = 0;
    double wall_time_s = 0.0;
    TimeFunction z;
    TimeFunction p;
    TimeFunction q;
    dual::PrimalPair primal;
};

/// Semismooth Newton from (z0, p0) (zero when empty). Stops once the
/// residual norm after a step is <= cfg.tol; throws after cfg.max_outer steps.
SsnReport ssn_solve(const dual::DualProblem& prob, const SsnConfig& cfg = {}, const TimeFunction& z0 = {},
                    const TimeFunction& p0 = {});

}  // namespace dualocp::ssn
