#include "skewgp/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace skewgp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool uses_noise(const Dataset& data) {
    for (const Observation& o : data.observations)
        if (!std::holds_alternative<ClassObs>(o)) return true;
    return false;
}

bool has_numeric(const Dataset& data) {
    for (const Observation& o : data.observations) {
        if (std::holds_alternative<NumObs>(o)) return true;
        if (const auto* v = std::get_if<ValidObs>(&o); v && v->valid) return true;
    }
    return false;
}

SkewPriorSpec with_theta(const SkewPriorSpec& prior, const Vector& theta) {
    SkewPriorSpec out = prior;
    out.kernel = kernel_from_theta(theta);
    return out;
}

FitOptions objective_options(const FitConfig& config, std::uint64_t partition_seed) {
    FitOptions o;
    o.n_samples = 0;
    o.burn_in = 0;
    o.marginal = MarginalMode::none;
    o.block_size = config.block_size;
    o.partition_seed = partition_seed;
    o.cdf_method = config.cdf_method;
    return o;
}

// Whether the latent CDF term is evaluated exactly, so that its gradient is
// the truncated-moment identity.
bool moment_gradient_applies(const SkewPriorSpec& prior, const Dataset& data, const FitConfig& config) {
    if (!config.gradient_polish || prior.latent_dim != 0 || has_numeric(data) || data.observations.empty()) return false;
    return config.objective == MarginalMode::exact ||
           static_cast<Index>(data.observations.size()) * 2 <= config.block_size;
}

struct Search {
    const SkewPriorSpec& prior;
    const Dataset& data;
    const FitConfig& config;
    const HyperBounds& box;
    std::uint64_t partition_seed;
    Index evaluations = 0;

    double value(const Vector& theta) {
        ++evaluations;
        return objective(theta, prior, data, partition_seed, config);
    }
    Vector gradient(const Vector& theta) {
        Vector g = objective_gradient(theta, prior, data, partition_seed, config);
        for (Index k = 0; k < g.size(); ++k)
            if (box.lower(k) == box.upper(k)) g(k) = 0.0;
        return g;
    }
};

// Metropolis random walk with geometric cooling; returns the best point visited.
Vector anneal(Search& search, Vector theta, double& best_value, std::mt19937_64& rng) {
    const Vector width = search.box.upper - search.box.lower;
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double current = search.value(theta);
    Vector best = theta;
    best_value = current;
    double temperature = std::isfinite(current) ? std::max(1.0, 0.05 * std::abs(current)) : 1.0;
    const int steps = search.config.anneal_steps;
    for (int k = 0; k < steps; ++k) {
        const double shrink = 0.2 * (1.0 - 0.8 * k / std::max(1, steps));
        Vector prop = theta;
        for (Index j = 0; j < prop.size(); ++j) prop(j) += shrink * width(j) * nd(rng);
        prop = search.box.clamp(prop);
        const double v = search.value(prop);
        const bool accept = v >= current || (std::isfinite(v) && unif(rng) < std::exp((v - current) / temperature));
        if (accept || !std::isfinite(current)) {
            theta = prop;
            current = v;
        }
        if (current > best_value) {
            best_value = current;
            best = theta;
        }
        temperature *= 0.97;
    }
    return best;
}

// Projected L-BFGS ascent with Armijo backtracking.
Vector polish(Search& search, Vector theta, double& value) {
    value = search.value(theta);
    if (!std::isfinite(value)) return theta;
    std::deque<std::pair<Vector, Vector>> memory;  // (s, y) of the minimized -objective
    Vector grad = -search.gradient(theta);
    for (int it = 0; it < search.config.local_iterations; ++it) {
        Vector q = grad;
        std::vector<double> alpha(memory.size());
        for (std::size_t i = memory.size(); i-- > 0;) {
            const auto& [s, y] = memory[i];
            alpha[i] = s.dot(q) / y.dot(s);
            q -= alpha[i] * y;
        }
        if (!memory.empty()) {
            const auto& [s, y] = memory.back();
            q *= s.dot(y) / y.squaredNorm();
        }
        for (std::size_t i = 0; i < memory.size(); ++i) {
            const auto& [s, y] = memory[i];
            q += (alpha[i] - y.dot(q) / y.dot(s)) * s;
        }
        Vector dir = -q;
        if (dir.dot(grad) >= 0.0) {
            dir = -grad;
            memory.clear();
        }
        double step = 1.0;
        Vector next;
        double next_value = kNegInf;
        bool improved = false;
        for (int b = 0; b < 30; ++b, step *= 0.5) {
            next = search.box.clamp(theta + step * dir);
            if ((next - theta).norm() < 1e-12) break;
            next_value = search.value(next);
            if (std::isfinite(next_value) && next_value >= value + 1e-4 * grad.dot(theta - next)) {
                improved = true;
                break;
            }
        }
        if (!improved) break;
        const Vector next_grad = -search.gradient(next);
        const Vector s = next - theta, y = next_grad - grad;
        const double gain = next_value - value;
        theta = next;
        value = next_value;
        grad = next_grad;
        if (y.dot(s) > 1e-12) {
            memory.emplace_back(s, y);
            if (memory.size() > 6) memory.pop_front();
        }
        if (gain < 1e-9 * (1.0 + std::abs(value))) break;
    }
    return theta;
}

}  // namespace

Vector theta_from_kernel(const KernelSpec& kernel) {
    kernel.validate();
    const Index d = kernel.dim();
    Vector theta(d + 2);
    theta.head(d) = kernel.lengthscales.array().log();
    theta(d) = std::log(kernel.variance);
    theta(d + 1) = std::log(std::max(kernel.noise_variance, 1e-300));
    return theta;
}

KernelSpec kernel_from_theta(const Vector& theta) {
    if (theta.size() < 3) throw InputError("kernel_from_theta: need at least one lengthscale");
    const Index d = theta.size() - 2;
    KernelSpec k;
    k.lengthscales = theta.head(d).array().exp();
    k.variance = std::exp(theta(d));
    k.noise_variance = std::exp(theta(d + 1));
    return k;
}

void HyperBounds::validate(Index dim) const {
    if (lower.size() != dim || upper.size() != dim) throw InputError("bounds: expected " + std::to_string(dim) + " entries");
    if (!lower.allFinite() || !upper.allFinite()) throw InputError("bounds: entries must be finite");
    if ((lower.array() > upper.array()).any()) throw InputError("bounds: lower exceeds upper");
}

Vector HyperBounds::clamp(const Vector& theta) const { return theta.cwiseMax(lower).cwiseMin(upper); }

HyperBounds default_bounds(const Dataset& data, double noise_log_var) {
    const Index d = data.inputs.cols();
    HyperBounds b;
    b.lower.resize(d + 2);
    b.upper.resize(d + 2);
    for (Index j = 0; j < d; ++j) {
        const double range = data.inputs.rows() > 0 ? data.inputs.col(j).maxCoeff() - data.inputs.col(j).minCoeff() : 0.0;
        const double r = range > 0.0 ? range : 1.0;
        b.lower(j) = std::log(1e-2 * r);
        b.upper(j) = std::log(1e2 * r);
    }
    b.lower(d) = -6.0;
    b.upper(d) = 6.0;
    if (uses_noise(data)) {
        b.lower(d + 1) = -10.0;
        b.upper(d + 1) = 2.0;
    } else {
        b.lower(d + 1) = b.upper(d + 1) = noise_log_var;
    }
    return b;
}

void FitConfig::validate() const {
    if (block_size < 1) throw InputError("FitConfig: block_size must be >= 1");
    if (restarts < 1) throw InputError("FitConfig: restarts must be >= 1");
    if (anneal_steps < 0 || local_iterations < 0) throw InputError("FitConfig: iteration counts must be >= 0");
    if (!(fd_step > 0.0)) throw InputError("FitConfig: fd_step must be positive");
    if (objective == MarginalMode::none) throw InputError("FitConfig: objective cannot be 'none'");
}

double objective(const Vector& theta, const SkewPriorSpec& prior, const Dataset& data, std::uint64_t partition_seed,
                 const FitConfig& config) {
    if (theta.size() != data.inputs.cols() + 2) throw InputError("objective: theta has the wrong length");
    if (!theta.allFinite()) return kNegInf;
    try {
        const SkewPriorSpec spec = with_theta(prior, theta);
        const ObservationSet obs = assemble(data, std::sqrt(spec.kernel.noise_variance));
        const FittedModel model = fit(spec, obs, objective_options(config, partition_seed));
        const double v = model.log_marginal_likelihood(config.objective);
        return std::isfinite(v) ? v : kNegInf;
    } catch (const NumericError&) {
        return kNegInf;
    }
}

Vector objective_gradient(const Vector& theta, const SkewPriorSpec& prior, const Dataset& data,
                          std::uint64_t partition_seed, const FitConfig& config) {
    const Index p = theta.size();
    const Index d = p - 2;
    Vector g(p);
    auto fd = [&](Index k) {
        Vector a = theta, b = theta;
        a(k) += config.fd_step;
        b(k) -= config.fd_step;
        const double fa = objective(a, prior, data, partition_seed, config);
        const double fb = objective(b, prior, data, partition_seed, config);
        return (std::isfinite(fa) && std::isfinite(fb)) ? (fa - fb) / (2.0 * config.fd_step) : 0.0;
    };
    if (!moment_gradient_applies(prior, data, config)) {
        for (Index k = 0; k < p; ++k) g(k) = fd(k);
        return g;
    }
    // log Phi(gamma; W K W^T + Sigma): kernel coordinates enter only through K.
    const SkewPriorSpec spec = with_theta(prior, theta);
    const ObservationSet obs = assemble(data, std::sqrt(spec.kernel.noise_variance));
    FitOptions o = objective_options(config, partition_seed);
    o.n_samples = config.gradient_draws;
    o.burn_in = 200;
    o.thin = config.gradient_thin;
    o.seed = splitmix(partition_seed, 7);
    const FittedModel model = fit(spec, obs, o);
    const Matrix& w = obs.probit.w;
    const Matrix k = kernel_matrix(spec.kernel, data.inputs, data.inputs);
    const Matrix draws = model.trunc_draws(config.gradient_draws);
    const Vector up = model.process()->gamma();
    const Matrix cov = model.process()->gamma_mat();
    for (Index j = 0; j < d; ++j) {
        Matrix dk = k;
        for (Index a = 0; a < k.rows(); ++a)
            for (Index b = 0; b < k.cols(); ++b) {
                const double diff = (data.inputs(a, j) - data.inputs(b, j)) / spec.kernel.lengthscales(j);
                dk(a, b) *= diff * diff;
            }
        g(j) = grad_log_mvn_cdf(up, cov, w * dk * w.transpose(), draws);
    }
    g(d) = grad_log_mvn_cdf(up, cov, w * k * w.transpose(), draws);
    g(d + 1) = fd(d + 1);
    return g;
}

OptimizeResult optimize(const SkewPriorSpec& prior, const Dataset& data, const FitConfig& config) {
    config.validate();
    const Index p = data.inputs.cols() + 2;
    if (prior.kernel.dim() != data.inputs.cols()) throw InputError("optimize: prior and inputs differ in dimension");
    const double noise0 = std::log(std::max(prior.kernel.noise_variance, 1e-10));
    const HyperBounds box = config.bounds ? *config.bounds : default_bounds(data, noise0);
    box.validate(p);

    OptimizeResult result;
    result.objective = kNegInf;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int r = 0; r < config.restarts; ++r) {
        std::mt19937_64 rng(splitmix(config.seed, static_cast<std::uint64_t>(r)));
        Search search{prior, data, config, box, splitmix(config.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(r))};
        Vector start(p);
        for (Index k = 0; k < p; ++k) start(k) = box.lower(k) + unif(rng) * (box.upper(k) - box.lower(k));
        // the first restart starts from the prior's own hyperparameters when they lie in the box
        if (r == 0) {
            Vector own = theta_from_kernel(prior.kernel);
            own(p - 1) = std::max(own(p - 1), box.lower(p - 1));
            start = box.clamp(own);
        }
        double value = kNegInf;
        Vector theta = start;
        if (config.optimizer == Optimizer::annealed_global)
            theta = anneal(search, start, value, rng);
        theta = polish(search, theta, value);
        result.evaluations += search.evaluations;
        result.restart_best.push_back(value);
        if (value > result.objective) {
            result.objective = value;
            result.theta = theta;
        }
    }
    if (!std::isfinite(result.objective)) throw OptimizationError("optimize: no restart reached a finite objective");
    result.prior = with_theta(prior, result.theta);
    result.model = fit(result.prior, assemble(data, std::sqrt(result.prior.kernel.noise_variance)), config.final_fit);
    return result;
}

}  // namespace skewgp
