#pragma once

#include "skewgp/common.hpp"
#include "skewgp/mvn_cdf.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace skewgp {

/// Unified skew-normal SUN_{p,s}(xi, Omega, Delta, gamma, Gamma). Delta is on
/// the correlation scale: Cov(z, t) = D_Omega Delta for the latent t ~ N(0, Gamma)
/// that is conditioned on t + gamma > 0.
struct SunParams {
    Vector xi;         // p
    Matrix omega;      // p x p
    Matrix delta;      // p x s
    Vector gamma;      // s
    Matrix gamma_mat;  // s x s

    Index dim() const { return xi.size(); }
    Index latent_dim() const { return gamma.size(); }
    /// sqrt(diag Omega), floored at 1e-12.
    Vector scale() const;
    /// D_Omega Delta, the covariance-scale skewness matrix.
    Matrix skew_cov() const;

    /// Throws InputError on inconsistent sizes and NumericError unless Omega,
    /// Gamma and [[Gamma, Delta^T], [Delta, Omega_bar]] are positive definite.
    void validate() const;
    /// Shape check only (no factorizations).
    void check_sizes() const;

    /// Builds parameters from a covariance-scale skewness matrix B = D_Omega Delta.
    static SunParams from_skew_cov(Vector xi, Matrix omega, const Matrix& skew_cov, Vector gamma, Matrix gamma_mat);
};

/// log density; Phi_0 == 1. The two s-dimensional CDFs use `method`.
double sun_log_pdf(const SunParams& params, const Vector& z, CdfMethod method = CdfMethod::automatic);

/// Marginal of the coordinates in `keep` (any order).
SunParams sun_marginal(const SunParams& params, const std::vector<Index>& keep);

/// Distribution of the remaining coordinates given z_observed = values.
SunParams sun_conditional(const SunParams& params, const std::vector<Index>& observed, const Vector& values);

struct SampleBatch {
    Matrix values;       // m x p
    std::uint64_t seed = 0;
    Matrix trunc_draws;  // m x s, each row t with t + gamma > 0
};

/// m draws z = xi + D_Omega Delta Gamma^-1 t + r0, r0 ~ N(0, Omega - B Gamma^-1 B^T).
/// `reuse` supplies the truncated component t verbatim (m x s).
SampleBatch sun_sample(const SunParams& params, Index m, std::uint64_t seed,
                       const std::optional<Matrix>& reuse = std::nullopt);

struct Skewness {
    double value = 0.0;
    bool degenerate = false;  // zero sample variance
};

/// Sample skewness E[(h - mu)^3] / E[(h - mu)^2]^{3/2} with 1/m moments.
Skewness skewness_statistic(const Vector& samples);

}  // namespace skewgp
