#pragma once

#include "skewgp/common.hpp"

namespace skewgp {

/// RBF kernel hyperparameters: per-dimension lengthscales, signal variance and
/// observation noise variance.
struct KernelSpec {
    Vector lengthscales;
    double variance = 1.0;
    double noise_variance = 0.0;

    Index dim() const { return lengthscales.size(); }
    /// Throws InputError unless lengthscales > 0, variance > 0, noise_variance >= 0.
    void validate() const;
};

/// SkewGP prior: a base kernel plus s pseudo-points and a +-1 phase per pseudo-point.
/// latent_dim == 0 gives a plain GP prior.
struct SkewPriorSpec {
    KernelSpec kernel;
    Matrix pseudo_points;  // s x d
    Vector phase;          // diagonal of L, entries in {-1, +1}
    Index latent_dim = 0;
    double mean_constant = 0.0;

    void validate() const;
    static SkewPriorSpec gaussian(KernelSpec kernel, double mean_constant = 0.0);
};

/// sigma^2 exp(-0.5 sum_k (x1_ik - x2_jk)^2 / l_k^2).
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& x1, const Matrix& x2);

/// Finite-dimensional SkewGP prior parameters at a set of inputs.
struct PriorBlocks {
    Vector xi;     // n
    Matrix omega;  // n x n, noise free
    Matrix delta;  // n x s, correlation scale
    Vector gamma;  // s
    Matrix gamma_mat;  // s x s
};

/// Gamma = L Kbar(U,U) L, Delta = Kbar(X,U) L with Kbar = K / sigma^2.
/// Throws NumericError when the assembled [[Gamma, Delta^T], [Delta, Omega_bar]]
/// fails a jittered Cholesky.
PriorBlocks build_prior(const SkewPriorSpec& spec, const Matrix& x);

/// Assembles M = [[Gamma, Delta^T], [Delta, Omega_bar]].
Matrix assemble_m(const Matrix& omega_bar, const Matrix& delta, const Matrix& gamma_mat);

}  // namespace skewgp
