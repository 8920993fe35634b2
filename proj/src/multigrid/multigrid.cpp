#include "dualocp/multigrid/multigrid.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>

#include "dualocp/fem/assembly.hpp"
#include "dualocp/fem/mesh.hpp"

namespace dualocp::mg {

namespace {

std::atomic<std::size_t> g_cap_warnings{0};

constexpr int kCoarsestLevel = 2;

}  // namespace

std::size_t cap_warning_count() { return g_cap_warnings.load(); }
void reset_cap_warning_count() { g_cap_warnings.store(0); }

MgHierarchy::MgHierarchy(int fine_level, double nu, double mass_density, SmootherConfig smoother)
    : mass_density_(mass_density), smoother_(smoother)
{
    if (fine_level < 1) throw std::invalid_argument("MgHierarchy: level must be >= 1");
    if (mass_density < 0.0 || !(nu > 0.0)) throw std::invalid_argument("MgHierarchy: need nu > 0, mass density >= 0");
    const int lo = std::min(fine_level, kCoarsestLevel);
    fem::SpaceMesh prev;
    for (int l = lo; l <= fine_level; ++l) {
        fem::SpaceMesh mesh = fem::build_mesh(l);
        Level lv;
        lv.level = l;
        la::SparseMat k = fem::assemble_stiffness(mesh);
        lv.k = la::add(nu, k, 0.0, k);
        lv.m = fem::assemble_lumped_mass(mesh, false);
        lv.k_diag = lv.k.diag();
        if (l > lo) {
            lv.prolong = fem::prolongation(prev, mesh);
            lv.inject.resize(prev.num_interior());
            for (std::size_t c = 0; c < prev.num_interior(); ++c) {
                const std::size_t node = prev.interior_nodes[c];
                const std::size_t ci = node % (prev.cells_per_side + 1);
                const std::size_t cj = node / (prev.cells_per_side + 1);
                lv.inject[c] = mesh.interior_index[mesh.node_id(2 * ci, 2 * cj)];
            }
        }
        levels_.push_back(std::move(lv));
        prev = std::move(mesh);
    }
}

ShiftedSystem::ShiftedSystem(const MgHierarchy& h, std::span<const double> shift) : h_(&h)
{
    const auto& levels = h.levels();
    const std::size_t nl = levels.size();
    diag_.resize(nl);
    full_diag_.resize(nl);

    // density sigma = D_ii / M_ii on the finest level, injected downward
    la::Vec sigma(h.size(), 0.0);
    if (!shift.empty()) {
        la::require_same_size(shift.size(), h.size(), "ShiftedSystem shift");
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            if (shift[i] < 0.0) throw std::invalid_argument("ShiftedSystem: shift entries must be >= 0");
            sigma[i] = shift[i] / levels.back().m[i];
        }
    }
    for (std::size_t lv = nl; lv-- > 0;) {
        const auto& L = levels[lv];
        diag_[lv].resize(L.m.size());
        full_diag_[lv].resize(L.m.size());
        for (std::size_t i = 0; i < L.m.size(); ++i) {
            diag_[lv][i] = (h.mass_density() + sigma[i]) * L.m[i];
            full_diag_[lv][i] = L.k_diag[i] + diag_[lv][i];
        }
        if (lv > 0) {
            la::Vec coarse(L.inject.size());
            for (std::size_t c = 0; c < coarse.size(); ++c) coarse[c] = sigma[L.inject[c]];
            sigma = std::move(coarse);
        }
    }

    const auto& c = levels.front();
    const auto n = static_cast<Eigen::Index>(c.m.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const auto off = c.k.row_offsets();
    const auto ci = c.k.col_indices();
    const auto v = c.k.values();
    for (std::size_t i = 0; i < c.m.size(); ++i) {
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ci[k])) += v[k];
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += diag_[0][i];
    }
    coarse_llt_.compute(a);
    if (coarse_llt_.info() != Eigen::Success) throw std::runtime_error("ShiftedSystem: coarse operator not SPD");
}

void ShiftedSystem::apply(std::size_t lv, std::span<const double> x, std::span<double> y) const
{
    h_->levels()[lv].k.multiply(x, y);
    const auto& d = diag_[lv];
    for (std::size_t i = 0; i < d.size(); ++i) y[i] += d[i] * x[i];
}

la::Vec ShiftedSystem::coarse_solve(std::span<const double> b) const
{
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = coarse_llt_.solve(bv);
    return la::Vec(x.data(), x.data() + x.size());
}

namespace {

void jacobi(const ShiftedSystem& sys, std::size_t lv, std::span<const double> b, la::Vec& x, la::Vec& work, int sweeps)
{
    const double omega = sys.hierarchy().smoother().omega;
    const auto& d = sys.diagonal(lv);
    for (int s = 0; s < sweeps; ++s) {
        sys.apply(lv, x, work);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += omega * (b[i] - work[i]) / d[i];
    }
}

void vcycle_level(const ShiftedSystem& sys, std::size_t lv, std::span<const double> b, la::Vec& x)
{
    if (lv == 0) {
        x = sys.coarse_solve(b);
        return;
    }
    const auto& L = sys.hierarchy().levels()[lv];
    const auto& sm = sys.hierarchy().smoother();
    la::Vec work(x.size());
    jacobi(sys, lv, b, x, work, sm.pre_sweeps);

    sys.apply(lv, x, work);
    for (std::size_t i = 0; i < x.size(); ++i) work[i] = b[i] - work[i];
    la::Vec rc(L.prolong.cols());
    L.prolong.multiply_transpose(work, rc);
    la::Vec ec(rc.size(), 0.0);
    vcycle_level(sys, lv - 1, rc, ec);
    L.prolong.multiply(ec, work);
    la::axpy(1.0, work, x);

    jacobi(sys, lv, b, x, work, sm.post_sweeps);
}

}  // namespace

la::Vec vcycle(const ShiftedSystem& sys, std::span<const double> b, std::span<const double> x0, int cycles)
{
    la::require_same_size(b.size(), sys.size(), "vcycle rhs");
    la::Vec x(sys.size(), 0.0);
    if (!x0.empty()) {
        la::require_same_size(x0.size(), sys.size(), "vcycle x0");
        std::copy(x0.begin(), x0.end(), x.begin());
    }
    const std::size_t top = sys.hierarchy().levels().size() - 1;
    for (int c = 0; c < cycles; ++c) {
        vcycle_level(sys, top, b, x);
        if (!la::all_finite(x)) throw std::runtime_error("vcycle: non-finite iterate in cycle " + std::to_string(c + 1));
    }
    return x;
}

BlockSolveResult solve_shifted_block(const ShiftedSystem& sys, std::span<const double> b, double tol,
                                     std::span<const double> x0, int max_cycles)
{
    BlockSolveResult res;
    const double bnorm = la::norm2(b);
    if (bnorm == 0.0) {
        res.x.assign(sys.size(), 0.0);
        res.converged = true;
        return res;
    }
    if (sys.hierarchy().levels().size() == 1) {
        res.x = sys.coarse_solve(b);
        res.converged = true;
        return res;
    }
    la::Vec x = x0.empty() ? la::Vec(sys.size(), 0.0) : la::Vec(x0.begin(), x0.end());
    la::Vec r(sys.size());
    auto rel_res = [&](const la::Vec& v) {
        sys.apply(v, r);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
        return la::norm2(r) / bnorm;
    };
    double rel = rel_res(x);
    la::Vec best = x;
    double best_rel = rel;
    for (int c = 0; c < max_cycles && rel > tol; ++c) {
        x = vcycle(sys, b, x, 1);
        rel = rel_res(x);
        res.cycles = c + 1;
        if (rel < best_rel) {
            best_rel = rel;
            best = x;
        }
    }
    res.converged = best_rel <= tol;
    if (!res.converged) g_cap_warnings.fetch_add(1);
    res.x = std::move(best);
    res.rel_residual = best_rel;
    return res;
}

BlockSolveResult solve_shifted_block(const MgHierarchy& h, std::span<const double> shift, std::span<const double> b,
                                     double tol, int max_cycles)
{
    ShiftedSystem sys(h, shift);
    return solve_shifted_block(sys, b, tol, {}, max_cycles);
}

}  // namespace dualocp::mg
