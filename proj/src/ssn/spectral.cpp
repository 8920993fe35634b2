#include "dualocp/ssn/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dualocp::ssn {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

la::DenseMat shift_matrix(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active)
{
    const std::size_t n = sys.space_size();
    la::DenseMat s = la::DenseMat::Zero(idx(sys.size()), idx(sys.size()));
    for (std::size_t k = 0; k < sys.blocks(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            s(idx(k * n + i), idx(k * n + i)) = std::sqrt(sys.ops().m[i] * sys.ops().m1[i] / gamma) * active[k][i];
        }
    }
    return s;
}

}  // namespace

la::DenseMat dense_diag(const TimeFunction& v)
{
    const la::Vec flat = parabolic::flatten(v);
    la::DenseMat d = la::DenseMat::Zero(idx(flat.size()), idx(flat.size()));
    for (std::size_t i = 0; i < flat.size(); ++i) d(idx(i), idx(i)) = flat[i];
    return d;
}

DenseSpaceTime assemble_dense(const SpaceTimeSystem& sys)
{
    if (sys.size() > 2000) throw std::invalid_argument("assemble_dense: system too large for dense assembly");
    const std::size_t n = sys.space_size();
    const std::size_t nb = sys.blocks();
    DenseSpaceTime d;
    d.kcal = la::DenseMat::Zero(idx(sys.size()), idx(sys.size()));
    const la::DenseMat khat = la::to_dense(sys.ops().khat);
    for (std::size_t k = 0; k < nb; ++k) {
        d.kcal.block(idx(k * n), idx(k * n), idx(n), idx(n)) = khat;
        if (k > 0) {
            for (std::size_t i = 0; i < n; ++i) d.kcal(idx(k * n + i), idx((k - 1) * n + i)) = -sys.coupling()[i];
        }
    }
    d.m = dense_diag(TimeFunction(nb, sys.ops().m));
    d.m1 = dense_diag(TimeFunction(nb, sys.ops().m1));
    return d;
}

la::DenseMat dense_jacobian(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active)
{
    const DenseSpaceTime d = assemble_dense(sys);
    const Eigen::Index n = idx(sys.size());
    la::DenseMat j(2 * n, 2 * n);
    j << d.m, d.kcal.transpose(), d.kcal, -(d.m1 * dense_diag(active)) / gamma;
    return j;
}

la::DenseMat dense_schur(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active)
{
    const DenseSpaceTime d = assemble_dense(sys);
    const la::DenseMat minv = d.m.diagonal().cwiseInverse().asDiagonal();
    return d.m1 * dense_diag(active) / gamma + d.kcal * minv * d.kcal.transpose();
}

la::DenseMat dense_schur_precond(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active)
{
    const DenseSpaceTime d = assemble_dense(sys);
    const la::DenseMat minv = d.m.diagonal().cwiseInverse().asDiagonal();
    const la::DenseMat l = d.kcal + shift_matrix(sys, gamma, active);
    return l * minv * l.transpose();
}

double zeta(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active)
{
    const DenseSpaceTime d = assemble_dense(sys);
    const la::DenseMat msqrt = d.m.diagonal().cwiseSqrt().asDiagonal();
    const la::DenseMat m1sqrt = d.m1.diagonal().cwiseSqrt().asDiagonal();
    const la::DenseMat kinv = d.kcal.inverse();
    const la::DenseMat f = msqrt * kinv * m1sqrt * dense_diag(active) / std::sqrt(gamma);
    const la::DenseMat id = la::DenseMat::Identity(f.rows(), f.cols());
    return la::spectral_norm((id + f).inverse());
}

ActiveSets make_active_pattern(std::size_t blocks, std::size_t n, ActivePattern pattern, std::uint64_t seed)
{
    ActiveSets a(blocks, la::Vec(n, pattern == ActivePattern::All ? 1.0 : 0.0));
    if (pattern == ActivePattern::Random) {
        std::mt19937_64 rng(seed);
        std::bernoulli_distribution coin(0.5);
        for (auto& blk : a) {
            for (double& v : blk) v = coin(rng) ? 1.0 : 0.0;
        }
    }
    return a;
}

std::vector<SpectralRow> spectral_study(const SpaceTimeSystem& sys, const std::vector<double>& gammas,
                                        const ActiveSets& active)
{
    std::vector<SpectralRow> rows;
    for (double gamma : gammas) {
        if (!(gamma > 0.0)) throw std::invalid_argument("spectral_study: gamma must be positive");
        const la::DenseMat c = dense_schur(sys, gamma, active);
        const la::DenseMat cp = dense_schur_precond(sys, gamma, active);
        const Eigen::VectorXd lam = la::dense_eig_general(c, cp);
        const la::DenseMat diff = 2.0 * c - cp;
        const Eigen::VectorXd lam_diff = la::dense_eig_general(diff, la::DenseMat::Identity(diff.rows(), diff.cols()));

        SpectralRow row;
        row.gamma = gamma;
        row.lambda_min = lam.minCoeff();
        row.lambda_max = lam.maxCoeff();
        row.zeta = zeta(sys, gamma, active);
        row.bound = row.zeta * row.zeta + (1.0 + row.zeta) * (1.0 + row.zeta);
        // 2C - ℂ is PSD in exact arithmetic; scale the round-off allowance by its magnitude
        row.min_eig_2c_minus_p = lam_diff.minCoeff() / std::max(1.0, lam_diff.cwiseAbs().maxCoeff());
        row.pass = row.lambda_min >= 0.5 - 1e-10 && row.lambda_max <= row.bound + 1e-8 &&
                   row.min_eig_2c_minus_p >= -1e-10;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace dualocp::ssn
