#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "dualocp/cli/cli.hpp"
#include "dualocp/frcg/frcg.hpp"
#include "dualocp/ssn/spectral.hpp"
#include "dualocp/ssn/ssn.hpp"

namespace dualocp::cli {

namespace {

parabolic::TimeFunction random_tf(std::size_t blocks, std::size_t n, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> dist(0.0, scale);
    parabolic::TimeFunction v(blocks, la::Vec(n));
    for (auto& b : v) {
        for (double& x : b) x = dist(rng);
    }
    return v;
}

struct Check {
    std::ostream& out;
    int failures = 0;

    void report(const std::string& name, bool pass, const std::string& detail)
    {
        out << (pass ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
        if (!pass) ++failures;
    }
};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

int cmd_verify(std::uint64_t seed, std::ostream& out)
{
    std::mt19937_64 rng(seed);
    Check chk{out};

    {
        auto prob = problems::build_example2(1e-3, 3);
        const auto& sys = *prob.sys;
        auto q = random_tf(sys.blocks(), sys.space_size(), rng);
        auto w = random_tf(sys.blocks(), sys.space_size(), rng);
        const double lhs = sys.inner_m1(sys.dual_state_sweep(q), w);
        const double rhs = sys.inner(q, sys.adjoint_sweep(w));
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
        chk.report("sweep adjointness", rel <= 1e-9, "relative mismatch " + num(rel));
    }

    {
        auto prob = problems::build_example1(1e-3, 2);
        const auto& sys = *prob.sys;
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            auto q = random_tf(sys.blocks(), sys.space_size(), rng, 0.05);
            auto d = random_tf(sys.blocks(), sys.space_size(), rng);
            const double eps = 1e-5;
            auto jq = [&](const parabolic::TimeFunction& x) { return dual::objective(prob.dual, x, sys.dual_state_sweep(x)); };
            const double fd = (jq(parabolic::lincomb(1.0, q, eps, d)) - jq(parabolic::lincomb(1.0, q, -eps, d))) / (2 * eps);
            const double an = sys.inner(dual::gradient(prob.dual, q).g, d);
            worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
        }
        chk.report("gradient vs central differences", worst <= 1e-6, "max relative error " + num(worst));
    }

    for (int ex = 1; ex <= 3; ++ex) {
        auto prob = ex == 1 ? problems::build_example1(1e-3, 3)
                            : ex == 2 ? problems::build_example2(1e-3, 3) : problems::build_example3(1e-4, 3);
        auto rep = frcg::frcg_solve(prob.dual);
        const double primal = dual::primal_objective(prob.dual, rep.primal.u);
        const double gap = std::abs(primal + rep.j_final);
        chk.report("duality gap example" + std::to_string(ex), gap <= 1e-3 * (1 + std::abs(primal)), "gap " + num(gap));
    }

    {
        auto prob = problems::build_example1(1e-5, 3);
        const auto& sys = *prob.sys;
        auto active = ssn::make_active_pattern(sys.blocks(), sys.space_size(), ssn::ActivePattern::Random, seed);
        ssn::SchurPreconditioner prec(sys, prob.gamma, active, ssn::InnerSolve::VCycles, 2);
        auto r1 = random_tf(sys.blocks(), sys.space_size(), rng);
        auto r2 = random_tf(sys.blocks(), sys.space_size(), rng);
        const double a = la::dot(parabolic::flatten(prec.apply(r1)), parabolic::flatten(r2));
        const double b = la::dot(parabolic::flatten(r1), parabolic::flatten(prec.apply(r2)));
        const double rel = std::abs(a - b) / std::max(std::abs(a), 1e-300);
        chk.report("preconditioner symmetry", rel <= 1e-10, "relative asymmetry " + num(rel));
    }

    {
        const fem::SpaceMesh mesh = fem::build_mesh(1);
        parabolic::SpaceTimeSystem sys(fem::build_space_operators(mesh, 1.0 / 3, 1.0, 0.0), 1, 2, 1.0 / 3);
        auto active = ssn::make_active_pattern(sys.blocks(), sys.space_size(), ssn::ActivePattern::All, seed);
        bool pass = true;
        for (const auto& row : ssn::spectral_study(sys, {1e-1, 1e-4, 1e-8}, active)) pass = pass && row.pass;
        chk.report("preconditioned spectrum bounds", pass, "level 1, N = 3");
    }

    out << (chk.failures == 0 ? "all checks passed" : std::to_string(chk.failures) + " check(s) failed") << '\n';
    return chk.failures == 0 ? 0 : 1;
}

}  // namespace dualocp::cli
