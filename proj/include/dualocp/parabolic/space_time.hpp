#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dualocp/fem/assembly.hpp"
#include "dualocp/la/vec.hpp"
#include "dualocp/multigrid/multigrid.hpp"

namespace dualocp::parabolic {

struct TimeGrid {
    double T = 1.0;
    std::size_t N = 1;
    double dt = 1.0;
};

TimeGrid make_time_grid(double T, std::size_t N);

/// Sequence of per-slice coefficient vectors on interior nodes.
using TimeFunction = std::vector<la::Vec>;

TimeFunction zeros(std::size_t blocks, std::size_t n);
la::Vec flatten(const TimeFunction& v);
TimeFunction unflatten(std::span<const double> flat, std::size_t blocks);
/// y += alpha * x, blockwise
void axpy(double alpha, const TimeFunction& x, TimeFunction& y);
TimeFunction lincomb(double alpha, const TimeFunction& x, double beta, const TimeFunction& y);

/// Block space-time operators for backward Euler with a fixed number of
/// slices. Block k is coupled to its neighbours through C = M/dt; a
/// stationary problem is the one-block case with C = 0 and unit time weight.
///
/// Kcal: block lower bidiagonal with diagonal Khat and subdiagonal -C.
class SpaceTimeSystem {
public:
    /// time_weight multiplies every slice in the <.,.>_dt inner product
    /// (dt for a parabolic problem, 1 for a stationary one).
    SpaceTimeSystem(fem::SpaceOperators ops, int level, std::size_t blocks, double time_weight,
                    double sweep_tol = 1e-11);

    [[nodiscard]] const fem::SpaceOperators& ops() const { return ops_; }
    [[nodiscard]] std::size_t blocks() const { return blocks_; }
    [[nodiscard]] std::size_t space_size() const { return ops_.size(); }
    [[nodiscard]] std::size_t size() const { return blocks_ * ops_.size(); }
    [[nodiscard]] double time_weight() const { return time_weight_; }
    [[nodiscard]] const la::Vec& coupling() const { return coupling_; }
    [[nodiscard]] int level() const { return level_; }
    [[nodiscard]] const mg::MgHierarchy& hierarchy() const { return *hierarchy_; }
    [[nodiscard]] double sweep_tol() const { return sweep_tol_; }

    /// K̂ x = b to the sweep tolerance.
    [[nodiscard]] la::Vec solve_khat(std::span<const double> b, std::span<const double> x0 = {}) const;

    /// Backward recursion K̂ p_k = M q_k + C p_{k+1}, p_B = 0.
    [[nodiscard]] TimeFunction dual_state_sweep(const TimeFunction& q) const;
    /// Forward recursion K̂ z_k = M1 w_k + C z_{k-1}, z_{-1} = 0.
    [[nodiscard]] TimeFunction adjoint_sweep(const TimeFunction& w) const;
    /// Forward recursion K̂ y_k = M1 u_k + M f_k + C y_{k-1}, y_{-1} = y0.
    /// Empty u, y0 or f are treated as zero.
    [[nodiscard]] TimeFunction primal_state_sweep(const TimeFunction& u, std::span<const double> y0,
                                                  const TimeFunction& f) const;

    [[nodiscard]] TimeFunction apply_Kcal(const TimeFunction& v) const;
    [[nodiscard]] TimeFunction apply_Kcal_transpose(const TimeFunction& v) const;
    [[nodiscard]] TimeFunction apply_M(const TimeFunction& v) const;
    [[nodiscard]] TimeFunction apply_M1(const TimeFunction& v) const;
    [[nodiscard]] TimeFunction apply_M_inverse(const TimeFunction& v) const;

    /// time_weight * sum_k u_k^T M v_k
    [[nodiscard]] double inner(const TimeFunction& u, const TimeFunction& v) const;
    /// time_weight * sum_k u_k^T M1 v_k
    [[nodiscard]] double inner_m1(const TimeFunction& u, const TimeFunction& v) const;
    [[nodiscard]] double norm_sq(const TimeFunction& v) const { return inner(v, v); }

    /// Number of dual_state_sweep calls so far (instrumentation).
    [[nodiscard]] std::size_t dual_sweep_count() const { return dual_sweeps_; }
    [[nodiscard]] std::size_t adjoint_sweep_count() const { return adjoint_sweeps_; }

private:
    void check(const TimeFunction& v, const char* what) const;

    fem::SpaceOperators ops_;
    int level_;
    std::size_t blocks_;
    double time_weight_;
    double sweep_tol_;
    la::Vec coupling_;
    std::shared_ptr<mg::MgHierarchy> hierarchy_;
    std::shared_ptr<mg::ShiftedSystem> khat_system_;
    mutable std::size_t dual_sweeps_ = 0;
    mutable std::size_t adjoint_sweeps_ = 0;
};

}  // namespace dualocp::parabolic
