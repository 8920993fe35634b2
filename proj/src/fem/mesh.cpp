#include "dualocp/fem/mesh.hpp"

#include <stdexcept>
#include <string>

namespace dualocp::fem {

bool ControlBox::contains(double x1, double x2, double eps) const
{
    return x1 >= x1_lo - eps && x1 <= x1_hi + eps && x2 >= x2_lo - eps && x2 <= x2_hi + eps;
}

bool ControlBox::is_whole_domain() const
{
    return x1_lo <= 0.0 && x2_lo <= 0.0 && x1_hi >= 1.0 && x2_hi >= 1.0;
}

SpaceMesh build_mesh(int level, const ControlBox& control)
{
    if (level < 1) throw std::invalid_argument("build_mesh: level must be >= 1 (got " + std::to_string(level) + ")");
    if (level > 12) throw std::invalid_argument("build_mesh: level too large");
    if (control.x1_lo > control.x1_hi || control.x2_lo > control.x2_hi || control.x1_lo < 0.0 ||
        control.x2_lo < 0.0 || control.x1_hi > 1.0 || control.x2_hi > 1.0) {
        throw std::invalid_argument("build_mesh: control box must be a non-empty subset of the unit square");
    }

    SpaceMesh m;
    m.level = level;
    m.cells_per_side = std::size_t{1} << level;
    const std::size_t n = m.cells_per_side;
    m.h = 1.0 / static_cast<double>(n);
    m.control = control;

    const std::size_t nn = (n + 1) * (n + 1);
    m.nodes.resize(nn);
    m.boundary.resize(nn);
    m.control_mask.resize(nn);
    m.interior_index.assign(nn, kNotInterior);
    for (std::size_t j = 0; j <= n; ++j) {
        for (std::size_t i = 0; i <= n; ++i) {
            const std::size_t id = m.node_id(i, j);
            const double x1 = static_cast<double>(i) * m.h;
            const double x2 = static_cast<double>(j) * m.h;
            m.nodes[id] = {x1, x2};
            m.boundary[id] = (i == 0 || j == 0 || i == n || j == n);
            m.control_mask[id] = control.contains(x1, x2);
            if (!m.boundary[id]) {
                m.interior_index[id] = m.interior_nodes.size();
                m.interior_nodes.push_back(id);
            }
        }
    }

    m.triangles.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ll = m.node_id(i, j);
            const std::size_t lr = m.node_id(i + 1, j);
            const std::size_t ur = m.node_id(i + 1, j + 1);
            const std::size_t ul = m.node_id(i, j + 1);
            m.triangles.push_back({ll, lr, ur});
            m.triangles.push_back({ll, ur, ul});
        }
    }
    return m;
}

double signed_area(const SpaceMesh& mesh, std::size_t triangle)
{
    const auto& t = mesh.triangles.at(triangle);
    const auto& a = mesh.nodes[t[0]];
    const auto& b = mesh.nodes[t[1]];
    const auto& c = mesh.nodes[t[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void dump_mesh(const SpaceMesh& mesh, std::ostream& os)
{
    for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
        os << k << ' ' << mesh.nodes[k][0] << ' ' << mesh.nodes[k][1] << ' ' << (mesh.boundary[k] ? 1 : 0) << ' '
           << (mesh.control_mask[k] ? 1 : 0) << '\n';
    }
    for (const auto& t : mesh.triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace dualocp::fem
