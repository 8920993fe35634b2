#include "dualocp/frcg/frcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace dualocp::frcg {

void FrcgConfig::validate() const
{
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("frcg: c must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("frcg: tol must be positive");
    if (max_iter == 0) throw std::invalid_argument("frcg: max_iter must be positive");
}

FrcgReport frcg_solve(const dual::DualProblem& prob, const FrcgConfig& cfg)
{
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto& sys = prob.system();
    const std::size_t dual0 = sys.dual_sweep_count();
    const std::size_t adj0 = sys.adjoint_sweep_count();

    FrcgReport rep;
    rep.q = parabolic::zeros(sys.blocks(), sys.space_size());
    rep.p = parabolic::zeros(sys.blocks(), sys.space_size());
    double j = 0.0;
    dual::TimeFunction g = dual::gradient(prob, rep.q, rep.p).g;
    double gg = sys.norm_sq(g);
    const double gg0 = gg;
    rep.history.push_back({j, std::sqrt(gg), 0.0, 0, false});

    dual::TimeFunction d = parabolic::lincomb(-1.0, g, 0.0, g);
    dual::ObjectiveCache cache;
    rep.converged = gg0 == 0.0;

    for (std::size_t k = 0; k < cfg.max_iter && !rep.converged; ++k) {
        bool restarted = false;
        if (k > 0 && (k % cfg.restart_period == 0 || !(sys.inner(g, d) < 0.0))) {
            d = parabolic::lincomb(-1.0, g, 0.0, g);
            restarted = true;
            ++rep.restarts;
        }
        cache.p_q = rep.p;
        // rho_init = 0: start every search at the quadratic-model minimizer
        dual::ArmijoOptions opts;
        opts.c = cfg.c;
        dual::ArmijoResult ls;
        try {
            ls = dual::armijo_search(prob, rep.q, j, g, d, cache, opts);
        } catch (const std::exception& e) {
            throw std::runtime_error("frcg iteration " + std::to_string(k + 1) + ": " + e.what());
        }
        parabolic::axpy(ls.rho, d, rep.q);
        rep.p = std::move(ls.p_new);
        j = ls.j_new;

        g = dual::gradient(prob, rep.q, rep.p).g;
        const double gg_new = sys.norm_sq(g);
        const double beta = gg_new / gg;
        gg = gg_new;
        d = parabolic::lincomb(-1.0, g, beta, d);

        rep.iterations = k + 1;
        rep.history.push_back({j, std::sqrt(gg), ls.rho, ls.backtracks, restarted});
        rep.converged = gg <= cfg.tol * cfg.tol * gg0;
    }
    if (!rep.converged) {
        std::cerr << "warning: frcg stopped at max_iter " << cfg.max_iter << " (relative gradient "
                  << std::sqrt(gg / gg0) << ")\n";
    }

    rep.j_final = j;
    rep.primal = dual::recover_primal(prob, rep.q, rep.p);
    rep.dual_sweeps = sys.dual_sweep_count() - dual0;
    rep.adjoint_sweeps = sys.adjoint_sweep_count() - adj0;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace dualocp::frcg
