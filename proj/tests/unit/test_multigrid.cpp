#include <doctest.h>

#include <random>

#include "dualocp/fem/assembly.hpp"
#include "dualocp/la/dense.hpp"
#include "dualocp/la/pcg.hpp"
#include "dualocp/multigrid/multigrid.hpp"
#include "support.hpp"

using namespace dualocp;

namespace {

la::Vec residual(const mg::ShiftedSystem& sys, const la::Vec& b, const la::Vec& x)
{
    la::Vec ax(b.size());
    sys.apply(x, ax);
    la::Vec r(b);
    la::axpy(-1.0, ax, r);
    return r;
}

la::DenseMat dense_operator(const mg::ShiftedSystem& sys)
{
    return la::to_dense([&](std::span<const double> x, std::span<double> y) { sys.apply(x, y); }, sys.size());
}

}  // namespace

TEST_CASE("zero rhs is a fixed point")
{
    const mg::MgHierarchy h(3, 1.0, 16.0);
    const mg::ShiftedSystem sys(h, {});
    const la::Vec b(h.size(), 0.0);
    for (double v : mg::vcycle(sys, b, {}, 3)) CHECK(v == 0.0);
}

TEST_CASE("fine operator matches the assembled step operator")
{
    const auto ops = fem::build_space_operators(fem::build_mesh(3), 1.0 / 16, 1.0, 0.0);
    const mg::MgHierarchy h(3, 1.0, ops.mass_density());
    const mg::ShiftedSystem sys(h, {});
    CHECK((dense_operator(sys) - la::to_dense(ops.khat)).norm() <= 1e-12);
}

TEST_CASE("v-cycle contraction at level 3")
{
    const auto ops = fem::build_space_operators(fem::build_mesh(3), 1.0 / 16, 1.0, 0.0);
    const mg::MgHierarchy h(3, 1.0, ops.mass_density());
    const mg::ShiftedSystem sys(h, {});
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto b = testing::random_vec(h.size(), rng);
        const auto x1 = mg::vcycle(sys, b, {}, 1);
        CHECK(la::norm2(residual(sys, b, x1)) <= 0.2 * la::norm2(b));

        // 10 cycles at the per-cycle bound; 1e-10 needs 15 with this smoother (two-grid limit ~0.14)
        const auto x10 = mg::vcycle(sys, b, {}, 10);
        CHECK(la::norm2(residual(sys, b, x10)) <= std::pow(0.2, 10) * la::norm2(b));
        const auto x15 = mg::vcycle(sys, b, {}, 15);
        CHECK(la::norm2(residual(sys, b, x15)) <= 1e-10 * la::norm2(b));

        const auto truth = la::pcg_solve(la::as_operator(ops.khat), b, la::identity_operator(), 1e-14, 500);
        la::Vec diff(x15);
        la::axpy(-1.0, truth.x, diff);
        CHECK(la::norm2(diff) <= 1e-9 * la::norm2(truth.x));
    }
}

TEST_CASE("v-cycle error propagation has spectral radius below one")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1e4);
    const mg::MgHierarchy h(4, 1.0, 16.0);
    la::Vec shift(h.size());
    for (double& s : shift) s = unif(rng);
    for (const la::Vec& d : {la::Vec{}, shift}) {
        const mg::ShiftedSystem sys(h, d);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto b = testing::random_vec(h.size(), rng);
            const auto x = mg::vcycle(sys, b, {}, 1);
            worst = std::max(worst, la::norm2(residual(sys, b, x)) / la::norm2(b));
        }
        CHECK(worst < 1.0);
    }
}

TEST_CASE("v-cycle is linear in the right-hand side")
{
    const mg::MgHierarchy h(3, 1.0, 8.0);
    const mg::ShiftedSystem sys(h, {});
    std::mt19937_64 rng(29);
    const auto b1 = testing::random_vec(h.size(), rng);
    const auto b2 = testing::random_vec(h.size(), rng);
    la::Vec comb(b2);
    la::scale(-0.7, comb);
    la::axpy(2.5, b1, comb);
    const auto lhs = mg::vcycle(sys, comb, {}, 2);
    auto rhs = mg::vcycle(sys, b2, {}, 2);
    la::scale(-0.7, rhs);
    la::axpy(2.5, mg::vcycle(sys, b1, {}, 2), rhs);
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-12 * (1 + std::abs(rhs[i])));
}

TEST_CASE("shifted block solves")
{
    std::mt19937_64 rng(31);
    SUBCASE("zero shift is the plain step solve")
    {
        const mg::MgHierarchy h(3, 1.0, 8.0);
        const auto b = testing::random_vec(h.size(), rng);
        const auto a = mg::solve_shifted_block(h, {}, b, 1e-12);
        const mg::ShiftedSystem sys(h, {});
        const auto c = mg::solve_shifted_block(sys, b, 1e-12);
        CHECK(a.converged);
        CHECK(a.x == c.x);
    }
    SUBCASE("full active set at level 2 with gamma = 1e-5")
    {
        const auto ops = fem::build_space_operators(fem::build_mesh(2), 0.25, 1.0, 0.0);
        const mg::MgHierarchy h(2, 1.0, ops.mass_density());
        la::Vec shift(ops.size());
        for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = std::sqrt(ops.m[i] * ops.m1[i]) / std::sqrt(1e-5);
        const auto b = testing::random_vec(h.size(), rng);
        const auto r = mg::solve_shifted_block(h, shift, b, 1e-10);
        CHECK(r.converged);
        la::DenseMat a = la::to_dense(ops.khat);
        for (std::size_t i = 0; i < shift.size(); ++i) a(i, i) += shift[i];
        const Eigen::VectorXd x = a.llt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(r.x[i] == doctest::Approx(x(i)).epsilon(1e-8));
    }
    SUBCASE("huge shift at level 1 is diagonal dominated")
    {
        const mg::MgHierarchy h(1, 1.0, 2.0);
        const la::Vec shift{1e12};
        const la::Vec b{3.0};
        const auto r = mg::solve_shifted_block(h, shift, b, 1e-12);
        CHECK(r.x[0] == doctest::Approx(3.0 / (4.0 + 2.0 * 0.25 + 1e12)).epsilon(1e-12));
    }
}

TEST_CASE("cap warnings are counted")
{
    mg::reset_cap_warning_count();
    const mg::MgHierarchy h(4, 1.0, 16.0);
    std::mt19937_64 rng(37);
    const auto b = testing::random_vec(h.size(), rng);
    const auto r = mg::solve_shifted_block(h, {}, b, 1e-30, 2);
    CHECK_FALSE(r.converged);
    CHECK(r.cycles == 2);
    CHECK(mg::cap_warning_count() == 1);
    mg::reset_cap_warning_count();
}
