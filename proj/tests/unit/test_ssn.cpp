#include <doctest.h>

#include <random>

#include "dualocp/frcg/frcg.hpp"
#include "dualocp/la/pcg.hpp"
#include "dualocp/problems/problems.hpp"
#include "dualocp/ssn/spectral.hpp"
#include "dualocp/ssn/ssn.hpp"
#include "support.hpp"

using namespace dualocp;
using parabolic::TimeFunction;

namespace {

Eigen::VectorXd to_eigen(const TimeFunction& v)
{
    const auto f = parabolic::flatten(v);
    return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

la::DenseMat kcal_columns(const parabolic::SpaceTimeSystem& sys)
{
    const std::size_t b = sys.blocks();
    return la::to_dense(
        [&](std::span<const double> x, std::span<double> y) {
            const auto r = parabolic::flatten(sys.apply_Kcal(parabolic::unflatten(x, b)));
            std::copy(r.begin(), r.end(), y.begin());
        },
        sys.size());
}

struct Instance {
    parabolic::SpaceTimeSystem sys;
    dual::DualProblem prob;
};

std::unique_ptr<Instance> random_instance(int level, std::size_t blocks, double gamma, dual::ControlBounds bounds,
                                          std::mt19937_64& rng, double target_scale = 1.0)
{
    const fem::ControlBox box{0.0, 0.75, 0.0, 0.75};
    auto inst = std::make_unique<Instance>(
        Instance{testing::small_system(level, blocks, 1.0 / static_cast<double>(blocks + 1), 0.0, box), {}});
    const std::size_t n = inst->sys.space_size();
    inst->prob = dual::make_dual_problem(inst->sys, gamma, bounds, testing::random_tf(blocks, n, rng, target_scale),
                                         testing::random_vec(n, rng), {});
    return inst;
}

}  // namespace

TEST_CASE("residual at a trivial point")
{
    std::mt19937_64 rng(103);
    auto inst = random_instance(2, 3, 1e-3, {-1, 1}, rng);
    const auto z = inst->prob.effective_target;
    const auto p = parabolic::zeros(3, inst->sys.space_size());
    const auto r = ssn::residual_F(inst->prob, z, p);
    CHECK(testing::max_abs(r.r1) == 0.0);
    CHECK(testing::max_abs_diff(r.r2, inst->sys.apply_Kcal(z)) == 0.0);
}

TEST_CASE("newton step matches the dense generalized Jacobian solve")
{
    std::mt19937_64 rng(107);
    for (std::size_t blocks : {1u, 2u, 3u}) {
        auto inst = random_instance(1, blocks, 1e-2, {-0.3, 0.3}, rng);
        const auto& sys = inst->sys;
        const auto z = testing::random_tf(blocks, 1, rng);
        const auto p = testing::random_tf(blocks, 1, rng, 0.01);
        const auto active = ssn::active_sets(p, 1e-2, inst->prob.bounds);
        ssn::SsnConfig cfg;
        cfg.pcg_tol = 1e-14;
        const auto dir = ssn::newton_direction(inst->prob, z, p, active, cfg);
        const auto r = ssn::residual_F(inst->prob, z, p);
        const auto jac = ssn::dense_jacobian(sys, 1e-2, active);
        Eigen::VectorXd rhs(2 * sys.size());
        rhs << to_eigen(r.r1), to_eigen(r.r2);
        const Eigen::VectorXd delta = jac.lu().solve(-rhs);
        Eigen::VectorXd got(2 * sys.size());
        got << to_eigen(dir.dz), to_eigen(dir.dp);
        CHECK((got - delta).norm() <= 1e-9 * std::max(1.0, delta.norm()));
    }
}

TEST_CASE("dense jacobian blocks agree with operator application")
{
    const auto sys = testing::small_system(2, 2, 1.0 / 3);
    const auto d = ssn::assemble_dense(sys);
    CHECK((d.kcal - kcal_columns(sys)).norm() <= 1e-12 * d.kcal.norm());
}

TEST_CASE("preconditioner is linear and symmetric")
{
    std::mt19937_64 rng(109);
    const auto sys = testing::small_system(3, 4, 0.2);
    const auto active = ssn::make_active_pattern(4, sys.space_size(), ssn::ActivePattern::Random, 3);
    const ssn::SchurPreconditioner prec(sys, 1e-5, active, ssn::InnerSolve::VCycles, 2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto r1 = testing::random_tf(4, sys.space_size(), rng);
        const auto r2 = testing::random_tf(4, sys.space_size(), rng);
        const double a = la::dot(parabolic::flatten(prec.apply(r1)), parabolic::flatten(r2));
        const double b = la::dot(parabolic::flatten(r1), parabolic::flatten(prec.apply(r2)));
        CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
        const auto lhs = prec.apply(parabolic::lincomb(2.0, r1, -3.0, r2));
        const auto rhs = parabolic::lincomb(2.0, prec.apply(r1), -3.0, prec.apply(r2));
        CHECK(testing::max_abs_diff(lhs, rhs) <= 1e-10 * testing::max_abs(rhs));
    }
}

TEST_CASE("exact inner solves invert the factorized approximation")
{
    std::mt19937_64 rng(113);
    const auto sys = testing::small_system(1, 3, 0.25);
    const auto active = ssn::make_active_pattern(3, 1, ssn::ActivePattern::Random, 5);
    const ssn::SchurPreconditioner prec(sys, 1e-4, active, ssn::InnerSolve::Exact, 2);
    const auto cp = ssn::dense_schur_precond(sys, 1e-4, active);
    const auto r = testing::random_tf(3, 1, rng);
    const Eigen::VectorXd back = cp * to_eigen(prec.apply(r));
    CHECK((back - to_eigen(r)).norm() <= 1e-9 * to_eigen(r).norm());
}

TEST_CASE("empty active set makes the preconditioner exact")
{
    std::mt19937_64 rng(127);
    const auto sys = testing::small_system(2, 3, 0.25);
    const auto active = ssn::make_active_pattern(3, sys.space_size(), ssn::ActivePattern::None, 0);
    const ssn::SchurOperator op(sys, 1e-3, active);
    const ssn::SchurPreconditioner prec(sys, 1e-3, active, ssn::InnerSolve::Exact, 2);
    const auto b = parabolic::flatten(testing::random_tf(3, sys.space_size(), rng));
    const auto wrap = [&](auto& f) {
        return la::LinearOperator([&](std::span<const double> x, std::span<double> y) {
            const auto r = parabolic::flatten(f.apply(parabolic::unflatten(x, 3)));
            std::copy(r.begin(), r.end(), y.begin());
        });
    };
    const auto res = la::pcg_solve(wrap(op), b, wrap(prec), 1e-8, 50);
    CHECK(res.converged);
    CHECK(res.iters == 1);
}

TEST_CASE("ssn solves")
{
    std::mt19937_64 rng(131);
    SUBCASE("zero target")
    {
        auto sys = testing::small_system(2, 3, 0.25);
        const auto zero = parabolic::zeros(3, sys.space_size());
        auto prob = dual::make_dual_problem(sys, 1e-3, {-1, 1}, zero, la::Vec(sys.space_size(), 0.0), {});
        const auto rep = ssn::ssn_solve(prob);
        CHECK(rep.converged);
        CHECK(testing::max_abs(rep.q) <= 1e-12);
        CHECK(testing::max_abs(rep.primal.u) <= 1e-12);
    }
    SUBCASE("wide bounds give a single linear solve")
    {
        auto inst = random_instance(2, 3, 1e-2, {-1e12, 1e12}, rng);
        ssn::SsnConfig cfg;
        cfg.tol = 1e-8;
        cfg.pcg_tol = 1e-12;
        const auto rep = ssn::ssn_solve(inst->prob, cfg);
        CHECK(rep.iterations == 1);
        frcg::FrcgConfig fc;
        fc.tol = 1e-9;
        const auto fr = frcg::frcg_solve(inst->prob, fc);
        const auto diff = parabolic::lincomb(1.0, rep.q, -1.0, fr.q);
        CHECK(std::sqrt(inst->sys.norm_sq(diff)) <= 1e-6 * std::sqrt(inst->sys.norm_sq(fr.q)));
    }
    SUBCASE("active set settling ends the iteration")
    {
        auto prob = problems::build_example1(1e-5, 3);
        const auto rep = ssn::ssn_solve(prob.dual);
        REQUIRE(rep.converged);
        for (std::size_t k = 0; k + 1 < rep.history.size(); ++k) {
            if (rep.history[k].active_changes == 0) CHECK(rep.history[k + 1].residual <= 1e-4);
        }
        CHECK(rep.history.back().residual <= 1e-4);
        CHECK(rep.mean_cg <= static_cast<double>(rep.max_cg));
    }
    SUBCASE("different starting points reach the same solution")
    {
        auto prob = problems::build_example1(1e-4, 2);
        const auto& sys = *prob.sys;
        ssn::SsnConfig cfg;
        cfg.tol = 1e-10;
        cfg.pcg_tol = 1e-12;
        const auto a = ssn::ssn_solve(prob.dual, cfg);
        const auto z0 = testing::random_tf(sys.blocks(), sys.space_size(), rng);
        // undamped semismooth Newton is local: p0 is kept where p/γ stays mostly inside the bounds
        const auto p0 = testing::random_tf(sys.blocks(), sys.space_size(), rng, 1e-5);
        const auto b = ssn::ssn_solve(prob.dual, cfg, z0, p0);
        CHECK(testing::max_abs_diff(a.z, b.z) <= 1e-6);
        CHECK(testing::max_abs_diff(a.p, b.p) <= 1e-6 * std::max(1e-4, testing::max_abs(a.p)));
    }
    SUBCASE("agrees with frcg on example 1")
    {
        auto prob = problems::build_example1(1e-3, 4);
        const auto s = ssn::ssn_solve(prob.dual);
        const auto f = frcg::frcg_solve(prob.dual);
        const auto du = parabolic::lincomb(1.0, s.primal.u, -1.0, f.primal.u);
        CHECK(std::sqrt(prob.sys->norm_sq(du)) <= 1e-3);
    }
}

TEST_CASE("spectral study")
{
    const auto sys = testing::small_system(2, 3, 0.25);
    const std::size_t n = sys.space_size();

    const auto none = ssn::make_active_pattern(3, n, ssn::ActivePattern::None, 0);
    for (const auto& row : ssn::spectral_study(sys, {1e-2, 1e-6}, none)) {
        CHECK(row.lambda_min == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(row.lambda_max == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(row.pass);
    }
    for (auto pattern : {ssn::ActivePattern::All, ssn::ActivePattern::None}) {
        const auto active = ssn::make_active_pattern(3, n, pattern, 0);
        CHECK(ssn::spectral_study(sys, {1e-2}, active).front().pass);
    }

    const auto random = ssn::make_active_pattern(3, n, ssn::ActivePattern::Random, 9);
    const std::vector<double> gammas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    const auto rows = ssn::spectral_study(sys, gammas, random);
    for (const auto& row : rows) {
        CHECK(row.pass);
        CHECK(row.lambda_max <= 5.0);
    }

    // C is SPD
    const auto c = ssn::dense_schur(sys, 1e-6, random);
    CHECK(la::dense_eig_general(c, la::DenseMat::Identity(c.rows(), c.cols()))(0) > 0.0);

    // zeta from the smallest singular value of I + F
    const auto kcal = kcal_columns(sys);
    Eigen::VectorXd m(sys.size()), m1(sys.size()), pi = to_eigen(random);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            m(k * n + i) = std::sqrt(sys.ops().m[i]);
            m1(k * n + i) = std::sqrt(sys.ops().m1[i]);
        }
    }
    const double gamma = 1e-4;
    const la::DenseMat f = m.asDiagonal() * kcal.inverse() * m1.asDiagonal() * pi.asDiagonal() / std::sqrt(gamma);
    const la::DenseMat i_f = la::DenseMat::Identity(f.rows(), f.cols()) + f;
    const Eigen::JacobiSVD<la::DenseMat> svd(i_f);
    const double zeta = 1.0 / svd.singularValues().minCoeff();
    CHECK(ssn::zeta(sys, gamma, random) == doctest::Approx(zeta).epsilon(1e-9));
}

TEST_CASE("active set patterns")
{
    const auto a = ssn::make_active_pattern(2, 10, ssn::ActivePattern::Random, 4);
    const auto b = ssn::make_active_pattern(2, 10, ssn::ActivePattern::Random, 4);
    CHECK(ssn::count_differences(a, b) == 0);
    const auto all = ssn::make_active_pattern(2, 10, ssn::ActivePattern::All, 0);
    const auto none = ssn::make_active_pattern(2, 10, ssn::ActivePattern::None, 0);
    CHECK(ssn::count_differences(all, none) == 20);
}
