#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "dualocp/la/dense.hpp"
#include "dualocp/ssn/ssn.hpp"

namespace dualocp::ssn {

/// Dense space-time matrices of a (small) system, blocks ordered by slice.
struct DenseSpaceTime {
    la::DenseMat kcal;
    la::DenseMat m;
    la::DenseMat m1;
};

DenseSpaceTime assemble_dense(const SpaceTimeSystem& sys);
la::DenseMat dense_diag(const TimeFunction& v);

/// Dense generalized Jacobian [[M, Kcalᵀ], [Kcal, -M1 Π/γ]].
la::DenseMat dense_jacobian(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active);

/// C = M1 Π/γ + Kcal M⁻¹ Kcalᵀ and its factorized approximation
/// ℂ = (Kcal + SΠ) M⁻¹ (Kcal + SΠ)ᵀ, S = M^{1/2} M1^{1/2}/√γ.
la::DenseMat dense_schur(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active);
la::DenseMat dense_schur_precond(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active);

/// ζ = ||(I + M^{1/2} Kcal⁻¹ M1^{1/2} Π/√γ)⁻¹||_2
double zeta(const SpaceTimeSystem& sys, double gamma, const ActiveSets& active);

enum class ActivePattern { All, None, Random };

ActiveSets make_active_pattern(std::size_t blocks, std::size_t n, ActivePattern pattern, std::uint64_t seed);

struct SpectralRow {
    double gamma = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double zeta = 0.0;
    double bound = 0.0;
    double min_eig_2c_minus_p = 0.0;
    bool pass = false;
};

/// Dense spectrum of ℂ⁻¹C for each γ, with the bounds
/// 0.5 - 1e-10 <= λ <= ζ² + (1+ζ)² + 1e-8 and λ_min(2C - ℂ) >= -1e-10.
std::vector<SpectralRow> spectral_study(const SpaceTimeSystem& sys, const std::vector<double>& gammas,
                                        const ActiveSets& active);

}  // namespace dualocp::ssn
