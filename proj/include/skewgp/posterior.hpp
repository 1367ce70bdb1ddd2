#pragma once

#include "skewgp/kernels.hpp"
#include "skewgp/likelihoods.hpp"
#include "skewgp/mvn_cdf.hpp"
#include "skewgp/process.hpp"
#include "skewgp/sun.hpp"
#include "skewgp/trunc_sampler.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace skewgp {

/// How the latent CDF ratio of the marginal likelihood is evaluated.
enum class MarginalMode {
    automatic,      // exact when the posterior latent dimension is <= 100, else lower_bound
    exact,          // mvn_cdf over the full latent dimension
    lower_bound,    // block bound sum Phi_B - (b - 1); log of a non-positive bound is -inf
    block_product,  // sum log Phi_B, the independent-block surrogate
    none            // skip at fit time
};

struct FitOptions {
    Index n_samples = 3000;  // cached truncated draws; 0 defers sampling to first use
    int burn_in = 100;
    int thin = 1;
    std::uint64_t seed = 0;
    MarginalMode marginal = MarginalMode::automatic;
    Index block_size = 70;
    std::uint64_t partition_seed = 0;
    /// CDF method for the marginal likelihood and class probabilities.
    CdfMethod cdf_method = CdfMethod::automatic;
};

/// A posterior SkewGP together with its data and cached latent draws.
/// Immutable after construction; cheap to copy (shared state).
class FittedModel {
public:
    FittedModel() = default;

    /// The posterior process; usable as the prior of a further fit.
    const ProcessPtr& process() const { return posterior_; }
    const ProcessPtr& prior() const { return prior_; }
    /// Kernel prior specification at the root, when the fit started from one.
    const std::optional<SkewPriorSpec>& prior_spec() const { return prior_spec_; }
    /// Observation sets applied since the root prior, oldest first.
    const std::vector<ObservationSet>& history() const { return history_; }
    const ObservationSet& observations() const { return history_.back(); }
    const FitOptions& options() const { return options_; }

    /// SUN of f at the training inputs.
    SunParams posterior_at_train() const;
    /// Per-point univariate predictive SUNs.
    std::vector<SunParams> predict(const Matrix& xstar) const;
    /// Joint predictive SUN over all rows of xstar.
    SunParams predict_joint(const Matrix& xstar) const;

    /// Log marginal likelihood of the most recent observation set given the prior.
    double log_marginal_likelihood(MarginalMode mode = MarginalMode::exact) const;
    /// Value computed at fit time (NaN when skipped).
    double log_marginal() const { return log_marginal_; }

    /// m joint draws of f(xstar) (m x q). The truncated component is shared across
    /// calls; Gaussian noise for the j-th row of xstar comes from a stream keyed
    /// by (seed, j), so a prefix of xstar yields the prefix of the columns.
    Matrix sample_latent(const Matrix& xstar, Index m, std::uint64_t seed) const;

    /// Independent per-point draws (m x q) with the same marginals as
    /// sample_latent and the same shared truncated component; O(q n^2).
    Matrix sample_marginals(const Matrix& xstar, Index m, std::uint64_t seed) const;
    /// E[f(xstar)], with the truncated mean taken over the cached draws
    /// (at least 3000).
    Vector posterior_mean(const Matrix& xstar) const;
    /// The first m cached truncated draws (m x s), extending the stored chain
    /// deterministically when m exceeds the cache.
    Matrix trunc_draws(Index m) const;
    Index cached_draws() const { return draws_ ? draws_->rows() : 0; }
    const LinEssChain* chain() const { return chain_.get(); }

    /// P(y* = +1) under the probit link, exact via a (s+1)-dimensional CDF ratio
    /// when s + 1 <= 100, otherwise averaged over the cached draws.
    Vector class_probability(const Matrix& xstar) const;

    friend FittedModel fit(ProcessPtr prior, const ObservationSet& obs, const FitOptions& options);
    friend FittedModel fit(const SkewPriorSpec& prior, const ObservationSet& obs, const FitOptions& options);
    friend FittedModel refine(const FittedModel& model, const ObservationSet& obs, const FitOptions& options);

private:
    Matrix solved_draws(Index m) const;  // Gamma^-1 T^T for the first m draws

    ProcessPtr prior_;
    ProcessPtr posterior_;
    std::optional<SkewPriorSpec> prior_spec_;
    std::vector<ObservationSet> history_;
    FitOptions options_;
    double log_evidence_ = 0.0;  // Gaussian factor of the marginal likelihood
    double log_marginal_ = 0.0;
    std::shared_ptr<const Matrix> draws_;          // n_samples x s
    std::shared_ptr<const Matrix> gamma_solve_;    // Gamma^-1 draws^T (s x n_samples)
    std::shared_ptr<const LinEssChain> chain_;     // state after the cached draws
    std::shared_ptr<const Eigen::LLT<Matrix>> gamma_chol_;
};

/// Probit block first, then the numeric block (mixed data). Throws NumericError
/// when C K C^T + R or the posterior Gamma cannot be factorized.
FittedModel fit(ProcessPtr prior, const ObservationSet& obs, const FitOptions& options = {});
FittedModel fit(const SkewPriorSpec& prior, const ObservationSet& obs, const FitOptions& options = {});
/// Fits further data on top of an existing posterior.
FittedModel refine(const FittedModel& model, const ObservationSet& obs, const FitOptions& options = {});

}  // namespace skewgp
