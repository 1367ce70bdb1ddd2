#pragma once

#include "skewgp/posterior.hpp"

#include <cstdint>
#include <optional>

namespace skewgp {

/// Hyperparameters live in log space as [log l_1..log l_d, log sigma^2, log sigma_v^2].
Vector theta_from_kernel(const KernelSpec& kernel);
KernelSpec kernel_from_theta(const Vector& theta);

/// Box in log space. A coordinate with lower == upper is held fixed.
struct HyperBounds {
    Vector lower, upper;
    void validate(Index dim) const;
    Vector clamp(const Vector& theta) const;
};

/// log l in [log(1e-2 r_j), log(1e2 r_j)] with r_j the input range of column j,
/// log sigma^2 in [-6, 6], log sigma_v^2 in [-10, 2]. When no record depends on
/// sigma_v (classification only) its coordinate is fixed at `noise_log_var`.
HyperBounds default_bounds(const Dataset& data, double noise_log_var = 0.0);

enum class Optimizer { annealed_global, multistart_local };

struct FitConfig {
    Index block_size = 70;
    Optimizer optimizer = Optimizer::annealed_global;
    int restarts = 3;
    std::optional<HyperBounds> bounds;
    std::uint64_t seed = 0;
    /// Latent CDF term of the objective: lower_bound (default) or block_product,
    /// or exact for small problems.
    MarginalMode objective = MarginalMode::lower_bound;
    CdfMethod cdf_method = CdfMethod::automatic;
    int anneal_steps = 150;
    int local_iterations = 40;
    double fd_step = 1e-4;
    /// Use the truncated-moment gradient of the latent CDF term where it applies
    /// (Gaussian prior, probit data only); other coordinates fall back to finite differences.
    bool gradient_polish = false;
    Index gradient_draws = 20000;
    int gradient_thin = 5;
    /// Options for the final refit at the optimum.
    FitOptions final_fit;

    void validate() const;
};

/// Log marginal likelihood surrogate at theta for the prior's pseudo-points and
/// phases. Deterministic in (theta, partition_seed); -inf when not finite.
double objective(const Vector& theta, const SkewPriorSpec& prior, const Dataset& data, std::uint64_t partition_seed,
                 const FitConfig& config = {});

/// Gradient of `objective` (central differences, or the moment identity when
/// config.gradient_polish applies).
Vector objective_gradient(const Vector& theta, const SkewPriorSpec& prior, const Dataset& data,
                          std::uint64_t partition_seed, const FitConfig& config = {});

class OptimizationError : public NumericError {
public:
    using NumericError::NumericError;
};

struct OptimizeResult {
    Vector theta;
    double objective = 0.0;
    SkewPriorSpec prior;  // kernel at theta
    FittedModel model;    // refit at theta with config.final_fit
    std::vector<double> restart_best;
    Index evaluations = 0;
};

/// Best of `restarts` independent searches, each with its own partition.
/// Throws OptimizationError when no restart reaches a finite objective.
OptimizeResult optimize(const SkewPriorSpec& prior, const Dataset& data, const FitConfig& config = {});

}  // namespace skewgp
