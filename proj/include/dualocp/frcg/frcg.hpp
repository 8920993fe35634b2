#pragma once

#include <cstddef>
#include <vector>

#include "dualocp/dual/dual.hpp"

namespace dualocp::frcg {

struct FrcgConfig {
    double tol = 1e-4;
    double c = 0.4;
    std::size_t max_iter = 500;
    std::size_t restart_period = 50;

    void validate() const;
};

struct FrcgIterate {
    double j = 0.0;
    double grad_norm = 0.0;  // ||g||_dt
    double rho = 0.0;
    int backtracks = 0;
    bool restarted = false;
};

struct FrcgReport {
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<FrcgIterate> history;  // entry 0 is the initial point
    std::size_t restarts = 0;
    std::size_t dual_sweeps = 0;
    std::size_t adjoint_sweeps = 0;
    double wall_time_s = 0.0;
    dual::TimeFunction q;
    dual::TimeFunction p;
    dual::PrimalPair primal;
    double j_final = 0.0;
};

/// Fletcher-Reeves CG on the discrete dual from q = 0. Stops once
/// ||g^k||²_dt <= tol² ||g^0||²_dt.
FrcgReport frcg_solve(const dual::DualProblem& prob, const FrcgConfig& cfg = {});

}  // namespace dualocp::frcg
