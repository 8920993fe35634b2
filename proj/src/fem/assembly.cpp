#include "dualocp/fem/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace dualocp::fem {

la::SparseMat assemble_stiffness(const SpaceMesh& mesh)
{
    const std::size_t n = mesh.num_interior();
    la::TripletBuilder tb(n, n);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = signed_area(mesh, t);
        if (!(area > 0.0)) throw std::invalid_argument("assemble_stiffness: degenerate or inverted triangle");
        // Gradients of barycentric coordinates: grad(phi_a) = rot(x_b - x_c) / (2 area).
        std::array<std::array<double, 2>, 3> grad{};
        for (int a = 0; a < 3; ++a) {
            const auto& pb = mesh.nodes[tri[(a + 1) % 3]];
            const auto& pc = mesh.nodes[tri[(a + 2) % 3]];
            grad[a] = {(pb[1] - pc[1]) / (2.0 * area), (pc[0] - pb[0]) / (2.0 * area)};
        }
        for (int a = 0; a < 3; ++a) {
            const std::size_t ia = mesh.interior_index[tri[a]];
            if (ia == kNotInterior) continue;
            for (int b = 0; b < 3; ++b) {
                const std::size_t ib = mesh.interior_index[tri[b]];
                if (ib == kNotInterior) continue;
                tb.add(ia, ib, area * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]));
            }
        }
    }
    // Diagonal-neighbor couplings cancel to round-off; drop them so the stored
    // pattern is the 5-point stencil.
    la::SparseMat raw = tb.build();
    la::TripletBuilder clean(n, n);
    const auto off = raw.row_offsets();
    const auto ci = raw.col_indices();
    const auto v = raw.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
            if (std::abs(v[k]) > 1e-13) clean.add(i, ci[k], v[k]);
        }
    }
    return clean.build(true);
}

la::Vec assemble_lumped_mass_all_nodes(const SpaceMesh& mesh)
{
    la::Vec m(mesh.num_nodes(), 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double share = signed_area(mesh, t) / 3.0;
        for (std::size_t node : mesh.triangles[t]) m[node] += share;
    }
    return m;
}

la::Vec assemble_lumped_mass(const SpaceMesh& mesh, bool restrict_to_control, ControlMassRule rule)
{
    la::Vec m(mesh.num_interior(), 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double share = signed_area(mesh, t) / 3.0;
        bool counted = true;
        if (restrict_to_control && rule == ControlMassRule::Barycenter) {
            double bx = 0.0, by = 0.0;
            for (std::size_t node : tri) {
                bx += mesh.nodes[node][0] / 3.0;
                by += mesh.nodes[node][1] / 3.0;
            }
            counted = mesh.control.contains(bx, by, 0.0);
        }
        if (!counted) continue;
        for (std::size_t node : tri) {
            const std::size_t i = mesh.interior_index[node];
            if (i == kNotInterior) continue;
            if (restrict_to_control && rule == ControlMassRule::NodalMask && !mesh.control_mask[node]) continue;
            m[i] += share;
        }
    }
    return m;
}

la::SparseMat prolongation(const SpaceMesh& coarse, const SpaceMesh& fine)
{
    if (fine.level != coarse.level + 1) throw std::invalid_argument("prolongation: fine.level must equal coarse.level + 1");
    la::TripletBuilder tb(fine.num_interior(), coarse.num_interior());
    auto add_parent = [&](std::size_t row, std::size_t ci, std::size_t cj, double w) {
        const std::size_t c = coarse.interior_index[coarse.node_id(ci, cj)];
        if (c != kNotInterior) tb.add(row, c, w);
    };
    for (std::size_t row = 0; row < fine.num_interior(); ++row) {
        const std::size_t node = fine.interior_nodes[row];
        const std::size_t fi = node % (fine.cells_per_side + 1);
        const std::size_t fj = node / (fine.cells_per_side + 1);
        const bool odd_i = fi % 2 == 1;
        const bool odd_j = fj % 2 == 1;
        if (!odd_i && !odd_j) {
            add_parent(row, fi / 2, fj / 2, 1.0);
        } else if (odd_i && !odd_j) {
            add_parent(row, (fi - 1) / 2, fj / 2, 0.5);
            add_parent(row, (fi + 1) / 2, fj / 2, 0.5);
        } else if (!odd_i && odd_j) {
            add_parent(row, fi / 2, (fj - 1) / 2, 0.5);
            add_parent(row, fi / 2, (fj + 1) / 2, 0.5);
        } else {
            // midpoint of the lower-left to upper-right diagonal
            add_parent(row, (fi - 1) / 2, (fj - 1) / 2, 0.5);
            add_parent(row, (fi + 1) / 2, (fj + 1) / 2, 0.5);
        }
    }
    return tb.build();
}

SpaceOperators build_space_operators(const SpaceMesh& mesh, double dt, double nu, double a0, ControlMassRule rule)
{
    if (dt < 0.0 || !(nu > 0.0) || a0 < 0.0) {
        throw std::invalid_argument("build_space_operators: need dt >= 0, nu > 0, a0 >= 0");
    }
    SpaceOperators ops;
    ops.dt = dt;
    ops.nu = nu;
    ops.a0 = a0;
    ops.m = assemble_lumped_mass(mesh, false);
    ops.m1 = mesh.control.is_whole_domain() ? ops.m : assemble_lumped_mass(mesh, true, rule);
    ops.k = assemble_stiffness(mesh);
    la::Vec shift = ops.m;
    la::scale(ops.mass_density(), shift);
    ops.khat = la::add(nu, ops.k, 1.0, la::SparseMat::diagonal(shift));
    return ops;
}

}  // namespace dualocp::fem
