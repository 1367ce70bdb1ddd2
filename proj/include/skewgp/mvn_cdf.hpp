#pragma once

#include "skewgp/common.hpp"

#include <cstdint>
#include <vector>

namespace skewgp {

enum class CdfMethod {
    automatic,               // m <= 2 closed form, m = 3 quadrature, 4..100 bivariate conditioning
    closed_form_1d_2d,
    bivariate_conditioning,  // deterministic Trinh-Genz style approximation
    univariate_conditioning, // same machinery with 1x1 blocks
    quasi_mc,                // randomized lattice rules over Genz's separation of variables
    trivariate_quadrature    // Gauss-Legendre over one coordinate of the exact bivariate conditional
};

/// Phi_m(upper; cov): P(X <= upper) for X ~ N(0, cov).
struct CdfRequest {
    Vector upper;
    Matrix cov;
    CdfMethod method = CdfMethod::automatic;
    int mc_samples = 10000;  // lattice points per randomization
    int randomizations = 12;
    std::uint64_t seed = 12345;
    /// Conditioning methods only: lattice points per randomization of a small
    /// quasi-MC run used for the error estimate. 0 reports the spread between
    /// bivariate and univariate conditioning instead (cheap, often optimistic).
    int check_points = 1000;
};

struct CdfResult {
    double probability = 1.0;
    double log_probability = 0.0;
    double error_estimate = 0.0;
    CdfMethod method_used = CdfMethod::closed_form_1d_2d;
};

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation r
/// (Genz's Gauss-Legendre evaluation of the Drezner-Wesolowsky integral).
double bvn_cdf(double h, double k, double r);

/// Evaluates Phi_m. Phi_0 == 1. Throws NumericError for an indefinite cov and
/// InputError for size mismatches or m > 100 under automatic selection.
CdfResult mvn_cdf(const CdfRequest& req);

/// Convenience wrapper: default options without the quasi-MC error check.
CdfResult mvn_cdf(const Vector& upper, const Matrix& cov, CdfMethod method = CdfMethod::automatic);

/// Disjoint index blocks covering 0..m-1.
struct Partition {
    std::vector<std::vector<Index>> blocks;
    Index block_size_target = 70;

    /// Throws InputError unless blocks are nonempty, disjoint and cover 0..m-1.
    void validate(Index m) const;
    /// Uniformly random balanced split into ceil(m / block_size) blocks.
    static Partition random_balanced(Index m, Index block_size, std::uint64_t seed);
    static Partition single(Index m);
};

/// sum_i Phi_{|B_i|}(upper_{B_i}; cov_{B_i}) - (b - 1). Can be negative.
double block_lower_bound(const Vector& upper, const Matrix& cov, const Partition& partition,
                         CdfMethod method = CdfMethod::automatic);

/// sum_i log Phi_{|B_i|}(upper_{B_i}; cov_{B_i}): the independent-block surrogate.
double block_log_product(const Vector& upper, const Matrix& cov, const Partition& partition,
                         CdfMethod method = CdfMethod::automatic);

/// d/dtheta log Phi_m(upper; cov) for a perturbation dcov = d cov / d theta,
/// given draws of the normal truncated above at `upper` (rows of trunc_draws;
/// draws truncated below at -upper give the same second moment).
double grad_log_mvn_cdf(const Vector& upper, const Matrix& cov, const Matrix& dcov, const Matrix& trunc_draws);

}  // namespace skewgp
