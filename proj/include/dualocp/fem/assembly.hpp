#pragma once

#include "dualocp/fem/mesh.hpp"
#include "dualocp/la/sparse.hpp"
#include "dualocp/la/vec.hpp"

namespace dualocp::fem {

/// How the lumped control mass M1 treats the boundary of the control box.
/// NodalMask: M1_ii = M_ii when node i lies in the closed box, else 0.
/// Barycenter: row sums over triangles whose barycenter lies in the box.
enum class ControlMassRule { NodalMask, Barycenter };

/// P1 stiffness on interior nodes (Dirichlet rows/columns deleted).
la::SparseMat assemble_stiffness(const SpaceMesh& mesh);

/// Lumped mass diagonal on interior nodes. With restrict_to_control the
/// integrals run over the control region per `rule`.
la::Vec assemble_lumped_mass(const SpaceMesh& mesh, bool restrict_to_control,
                             ControlMassRule rule = ControlMassRule::NodalMask);

/// Lumped mass over all nodes (boundary included, before elimination).
la::Vec assemble_lumped_mass_all_nodes(const SpaceMesh& mesh);

/// Linear interpolation from coarse to fine interior nodes.
la::SparseMat prolongation(const SpaceMesh& coarse, const SpaceMesh& fine);

/// Space operators on interior nodes for one backward-Euler step:
/// Khat = c_mass * M + nu * K with c_mass = 1/dt + a0 (or a0 alone when the
/// problem is stationary, dt = 0).
struct SpaceOperators {
    la::Vec m;
    la::Vec m1;
    la::SparseMat k;
    la::SparseMat khat;
    double dt = 0.0;
    double nu = 1.0;
    double a0 = 0.0;

    [[nodiscard]] std::size_t size() const { return m.size(); }
    /// Diagonal density multiplying M inside Khat.
    [[nodiscard]] double mass_density() const { return (dt > 0.0 ? 1.0 / dt : 0.0) + a0; }
};

/// dt > 0: parabolic step operator. dt == 0: stationary operator nu*K + a0*M.
SpaceOperators build_space_operators(const SpaceMesh& mesh, double dt, double nu, double a0,
                                     ControlMassRule rule = ControlMassRule::NodalMask);

}  // namespace dualocp::fem
