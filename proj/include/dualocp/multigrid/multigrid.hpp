#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dualocp/la/sparse.hpp"
#include "dualocp/la/vec.hpp"

namespace dualocp::mg {

struct SmootherConfig {
    double omega = 0.8;
    int pre_sweeps = 2;
    int post_sweeps = 2;
};

/// Geometric hierarchy for A = nu*K + c*M + D on the unit-square meshes, with
/// D a nonnegative diagonal shift. Coarse operators are re-discretized on each
/// level; D is carried as a density D_ii / M_ii injected at coincident nodes.
class MgHierarchy {
public:
    /// mass_density is c above (1/dt + a0 for a time step, a0 when stationary).
    MgHierarchy(int fine_level, double nu, double mass_density, SmootherConfig smoother = {});

    struct Level {
        int level = 0;
        la::SparseMat k;            // nu * stiffness
        la::Vec m;                  // lumped mass
        la::Vec k_diag;
        la::SparseMat prolong;      // from level-1 to this level (empty on the coarsest)
        std::vector<std::size_t> inject;  // coarse interior index -> fine interior index
    };

    [[nodiscard]] const std::vector<Level>& levels() const { return levels_; }
    [[nodiscard]] int coarsest_level() const { return levels_.front().level; }
    [[nodiscard]] int finest_level() const { return levels_.back().level; }
    [[nodiscard]] std::size_t size() const { return levels_.back().m.size(); }
    [[nodiscard]] double mass_density() const { return mass_density_; }
    [[nodiscard]] const SmootherConfig& smoother() const { return smoother_; }

private:
    std::vector<Level> levels_;
    double mass_density_;
    SmootherConfig smoother_;
};

/// A hierarchy bound to one diagonal shift; owns the per-level diagonals and
/// the coarsest-level Cholesky factor. Immutable after construction.
class ShiftedSystem {
public:
    /// shift: fine-level diagonal D (entries >= 0); empty means D = 0.
    ShiftedSystem(const MgHierarchy& h, std::span<const double> shift);

    [[nodiscard]] const MgHierarchy& hierarchy() const { return *h_; }
    [[nodiscard]] std::size_t size() const { return h_->size(); }

    /// y = A x on level index `lv` (0 = coarsest).
    void apply(std::size_t lv, std::span<const double> x, std::span<double> y) const;
    void apply(std::span<const double> x, std::span<double> y) const { apply(diag_.size() - 1, x, y); }

    [[nodiscard]] const la::Vec& diagonal(std::size_t lv) const { return full_diag_[lv]; }
    [[nodiscard]] const la::Vec& shift_diagonal(std::size_t lv) const { return diag_[lv]; }
    [[nodiscard]] la::Vec coarse_solve(std::span<const double> b) const;

private:
    const MgHierarchy* h_;
    std::vector<la::Vec> diag_;       // c*M + D per level
    std::vector<la::Vec> full_diag_;  // diag(A) per level
    Eigen::LLT<Eigen::MatrixXd> coarse_llt_;
};

/// `cycles` V-cycles starting from x0 (empty span means zero).
la::Vec vcycle(const ShiftedSystem& sys, std::span<const double> b, std::span<const double> x0, int cycles);

struct BlockSolveResult {
    la::Vec x;
    int cycles = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// V-cycles until ||b - Ax|| <= tol ||b|| or the cap. Hitting the cap returns
/// the best iterate and bumps the process-wide warning counter.
BlockSolveResult solve_shifted_block(const ShiftedSystem& sys, std::span<const double> b, double tol,
                                     std::span<const double> x0 = {}, int max_cycles = 30);

BlockSolveResult solve_shifted_block(const MgHierarchy& h, std::span<const double> shift, std::span<const double> b,
                                     double tol, int max_cycles = 30);

std::size_t cap_warning_count();
void reset_cap_warning_count();

}  // namespace dualocp::mg
