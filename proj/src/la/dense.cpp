#include "dualocp/la/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dualocp::la {

DenseMat to_dense(const SparseMat& a)
{
    DenseMat d = DenseMat::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
    const auto off = a.row_offsets();
    const auto ci = a.col_indices();
    const auto v = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ci[k])) = v[k];
        }
    }
    return d;
}

DenseMat to_dense(const LinearOperator& op, std::size_t n)
{
    const auto ni = static_cast<Eigen::Index>(n);
    DenseMat d(ni, ni);
    Vec e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return d;
}

namespace {

void check_residuals(const DenseMat& a, const DenseMat& b, const Eigen::VectorXd& lambda, const DenseMat& v)
{
    const double scale = std::max({1.0, a.norm(), b.norm()});
    double worst = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const Eigen::VectorXd vk = v.col(k);
        const double r = (a * vk - lambda(k) * (b * vk)).norm() / (vk.norm() * scale * std::max(1.0, std::abs(lambda(k))));
        worst = std::max(worst, r);
    }
    if (!(worst <= 1e-8)) {
        throw std::runtime_error("dense_eig_general: eigenpair residual too large (max " + std::to_string(worst) + ")");
    }
}

}  // namespace

Eigen::VectorXd dense_eig_general(const DenseMat& a, const DenseMat& b)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw std::invalid_argument("dense_eig_general: dimension mismatch");
    }
    if (a.rows() > 2000) throw std::invalid_argument("dense_eig_general: dimension exceeds 2000");

    const bool symmetric = (a - a.transpose()).norm() <= 1e-13 * std::max(1.0, a.norm());
    if (symmetric) {
        const DenseMat as = 0.5 * (a + a.transpose());
        const DenseMat bs = 0.5 * (b + b.transpose());
        Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat> es(as, bs);
        if (es.info() != Eigen::Success) throw std::runtime_error("dense_eig_general: B is not SPD or iteration failed");
        check_residuals(as, bs, es.eigenvalues(), es.eigenvectors());
        return es.eigenvalues();
    }

    Eigen::LLT<DenseMat> llt(b);
    if (llt.info() != Eigen::Success) throw std::runtime_error("dense_eig_general: B is not SPD");
    const DenseMat c = llt.solve(a);
    Eigen::EigenSolver<DenseMat> es(c);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_eig_general: QR iteration did not converge");
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (std::abs(ev(k).imag()) > 1e-8 * scale) {
            throw std::runtime_error("dense_eig_general: complex eigenvalue encountered");
        }
    }
    Eigen::VectorXd lambda = ev.real();
    const DenseMat v = es.eigenvectors().real();
    check_residuals(a, b, lambda, v);
    std::vector<double> sorted(lambda.data(), lambda.data() + lambda.size());
    std::sort(sorted.begin(), sorted.end());
    return Eigen::Map<Eigen::VectorXd>(sorted.data(), static_cast<Eigen::Index>(sorted.size()));
}

double spectral_norm(const DenseMat& a)
{
    Eigen::JacobiSVD<DenseMat> svd(a);
    return svd.singularValues()(0);
}

}  // namespace dualocp::la
