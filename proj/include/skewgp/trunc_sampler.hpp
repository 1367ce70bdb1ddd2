#pragma once

#include "skewgp/common.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace skewgp {

/// N(0, gamma_mat) truncated to the region x + gamma > 0 (componentwise).
struct TruncSpec {
    Vector gamma;
    Matrix gamma_mat;
    int burn_in = 100;
    int thin = 1;
    std::uint64_t seed = 0;
};

/// Counters for the rejection-free contract.
struct ChainStats {
    std::uint64_t steps = 0;
    std::uint64_t ellipses = 0;          // one per transition
    std::uint64_t angle_redraws = 0;     // analytic slice hit a rounding edge
    std::uint64_t bracket_fallbacks = 0; // analytic slice empty, shrinking bracket used
};

/// Linear elliptical slice sampler for the truncated normal above. Each
/// transition draws nu ~ N(0, Gamma), intersects the ellipse
/// x cos(t) + nu sin(t) with every half-space analytically and samples t
/// uniformly from the feasible arcs. Single-threaded; copies are independent.
class LinEssChain {
public:
    /// Factorizes gamma_mat, picks a feasible start and runs burn-in.
    explicit LinEssChain(const TruncSpec& spec);

    /// One Markov transition.
    const Vector& step();
    /// m draws, `thin` transitions apart.
    Matrix sample(Index m);

    const Vector& state() const { return x_; }
    const Vector& gamma() const { return gamma_; }
    Index dim() const { return gamma_.size(); }
    const ChainStats& stats() const { return stats_; }
    std::uint64_t seed() const { return seed_; }
    int thin() const { return thin_; }
    /// Engine state as text, for reproducibility logs and model files.
    std::string rng_state() const;
    void restore(const Vector& x, const std::string& rng_state, const ChainStats& stats);

private:
    Vector gamma_;
    std::shared_ptr<const Matrix> chol_;  // lower factor of Gamma
    Vector x_;
    std::mt19937_64 rng_;
    std::uint64_t seed_ = 0;
    int thin_ = 1;
    ChainStats stats_;
    // scratch
    Vector nu_;
    std::vector<std::pair<double, double>> arcs_;
};

/// x0 with x0 + gamma >= 1e-6: the origin when gamma > 1e-6, otherwise
/// coordinatewise max(-gamma_i + 1, 1). Throws InputError for non-finite gamma.
Vector feasible_start(const TruncSpec& spec);

/// m draws after burn-in (thinned).
Matrix liness_sample(const TruncSpec& spec, Index m);

/// (1/m) sum_i x_i x_i^T over the rows of `samples`.
Matrix trunc_second_moment(const Matrix& samples);

/// Potential scale reduction factor per coordinate; returns the maximum.
/// Each chain is an (m x s) matrix of post-burn-in draws.
double gelman_rubin(const std::vector<Matrix>& chains);

}  // namespace skewgp
