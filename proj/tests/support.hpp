#pragma once

#include <random>

#include "dualocp/fem/assembly.hpp"
#include "dualocp/fem/mesh.hpp"
#include "dualocp/parabolic/space_time.hpp"

namespace testing {

using dualocp::parabolic::TimeFunction;

inline TimeFunction random_tf(std::size_t blocks, std::size_t n, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> dist(0.0, scale);
    TimeFunction v(blocks, dualocp::la::Vec(n));
    for (auto& b : v) {
        for (double& x : b) x = dist(rng);
    }
    return v;
}

inline dualocp::la::Vec random_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> dist(0.0, scale);
    dualocp::la::Vec v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

// Parabolic system with `blocks` unknown slices of width dt.
inline dualocp::parabolic::SpaceTimeSystem small_system(int level, std::size_t blocks, double dt, double a0 = 0.0,
                                                        const dualocp::fem::ControlBox& box =
                                                            dualocp::fem::ControlBox::whole_domain())
{
    auto mesh = dualocp::fem::build_mesh(level, box);
    return {dualocp::fem::build_space_operators(mesh, dt, 1.0, a0), level, blocks, dt, 1e-13};
}

inline double max_abs_diff(const TimeFunction& a, const TimeFunction& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) m = std::max(m, std::abs(a[k][i] - b[k][i]));
    }
    return m;
}

inline double max_abs(const TimeFunction& a)
{
    double m = 0.0;
    for (const auto& b : a) {
        for (double v : b) m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace testing
