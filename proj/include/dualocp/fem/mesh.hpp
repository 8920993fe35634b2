#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

namespace dualocp::fem {

/// Closed axis-aligned box [x1_lo, x1_hi] x [x2_lo, x2_hi].
struct ControlBox {
    double x1_lo = 0.0, x1_hi = 1.0;
    double x2_lo = 0.0, x2_hi = 1.0;

    static ControlBox whole_domain() { return {}; }
    [[nodiscard]] bool contains(double x1, double x2, double eps = 1e-12) const;
    [[nodiscard]] bool is_whole_domain() const;
};

inline constexpr std::size_t kNotInterior = static_cast<std::size_t>(-1);

/// Uniform triangulation of the unit square; every cell is split along its
/// lower-left to upper-right diagonal. Nodes are numbered row-major with x1
/// running fastest: node(i, j) = j * (n + 1) + i for n = 2^level.
struct SpaceMesh {
    int level = 0;
    std::size_t cells_per_side = 0;
    double h = 0.0;
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<std::size_t, 3>> triangles;
    std::vector<bool> boundary;
    /// node index -> interior index, or kNotInterior
    std::vector<std::size_t> interior_index;
    /// interior index -> node index
    std::vector<std::size_t> interior_nodes;
    std::vector<bool> control_mask;
    ControlBox control;

    [[nodiscard]] std::size_t num_nodes() const { return nodes.size(); }
    [[nodiscard]] std::size_t num_interior() const { return interior_nodes.size(); }
    [[nodiscard]] std::size_t node_id(std::size_t i, std::size_t j) const { return j * (cells_per_side + 1) + i; }
};

SpaceMesh build_mesh(int level, const ControlBox& control = ControlBox::whole_domain());

double signed_area(const SpaceMesh& mesh, std::size_t triangle);

/// One node per line: index x1 x2 boundary-flag control-flag; then one
/// triangle per line prefixed with "t".
void dump_mesh(const SpaceMesh& mesh, std::ostream& os);

}  // namespace dualocp::fem
