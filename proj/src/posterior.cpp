#include "skewgp/posterior.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace skewgp {

namespace {

// Per-column Gaussian streams: seed and column index mixed by splitmix64.
std::uint64_t column_seed(std::uint64_t seed, Index j) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(j) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double log_cdf(const Vector& upper, const Matrix& cov, CdfMethod method) {
    if (upper.size() == 0) return 0.0;
    CdfRequest req;
    req.upper = upper;
    req.cov = cov;
    req.method = method;
    req.check_points = 0;
    return mvn_cdf(req).log_probability;
}

double log_cdf(const Vector& upper, const Matrix& cov, MarginalMode mode, Index block_size, std::uint64_t seed,
               CdfMethod method) {
    if (upper.size() == 0) return 0.0;
    if (mode == MarginalMode::automatic) mode = upper.size() <= 100 ? MarginalMode::exact : MarginalMode::lower_bound;
    switch (mode) {
        case MarginalMode::exact:
            return log_cdf(upper, cov, method);
        case MarginalMode::lower_bound: {
            const Partition p = Partition::random_balanced(upper.size(), block_size, seed);
            const double b = block_lower_bound(upper, cov, p, method);
            return b > 0.0 ? std::log(b) : -std::numeric_limits<double>::infinity();
        }
        case MarginalMode::block_product:
            return block_log_product(upper, cov, Partition::random_balanced(upper.size(), block_size, seed), method);
        default:
            break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

FittedModel fit(ProcessPtr prior, const ObservationSet& obs, const FitOptions& options) {
    if (!prior) throw InputError("fit: prior is null");
    obs.validate();
    if (obs.inputs.cols() != prior->input_dim()) throw InputError("fit: input dimension does not match the prior");
    if (options.n_samples < 0 || options.burn_in < 0 || options.thin < 1)
        throw InputError("fit: invalid sampling options");
    FittedModel model;
    model.prior_ = prior;
    model.options_ = options;
    model.history_ = {obs};
    ProcessPtr current = prior;
    if (obs.has_probit()) current = std::make_shared<ProbitUpdate>(current, obs.inputs, obs.probit);
    if (obs.has_numeric()) {
        auto num = std::make_shared<NumericUpdate>(current, obs.inputs, obs.numeric);
        model.log_evidence_ = num->log_evidence();
        current = num;
    }
    model.posterior_ = current;
    const Index s = current->latent_dim();
    if (s > 0) {
        const CholeskyResult chol = robust_cholesky(current->gamma_mat(), -1.0, "posterior Gamma");
        model.gamma_chol_ = std::make_shared<const Eigen::LLT<Matrix>>(chol.llt);
        TruncSpec spec;
        spec.gamma = current->gamma();
        spec.gamma_mat = current->gamma_mat();
        spec.burn_in = options.burn_in;
        spec.thin = options.thin;
        spec.seed = options.seed;
        auto chain = std::make_shared<LinEssChain>(spec);
        auto draws = std::make_shared<const Matrix>(chain->sample(options.n_samples));
        model.gamma_solve_ = std::make_shared<const Matrix>(chol.llt.solve(draws->transpose()));
        model.draws_ = draws;
        model.chain_ = chain;
    }
    model.log_marginal_ = options.marginal == MarginalMode::none ? std::numeric_limits<double>::quiet_NaN()
                                                                 : model.log_marginal_likelihood(options.marginal);
    return model;
}

FittedModel fit(const SkewPriorSpec& prior, const ObservationSet& obs, const FitOptions& options) {
    FittedModel model = fit(std::make_shared<KernelPrior>(prior), obs, options);
    model.prior_spec_ = prior;
    return model;
}

FittedModel refine(const FittedModel& model, const ObservationSet& obs, const FitOptions& options) {
    FittedModel out = fit(model.process(), obs, options);
    out.prior_spec_ = model.prior_spec();
    std::vector<ObservationSet> hist = model.history();
    hist.push_back(obs);
    out.history_ = std::move(hist);
    return out;
}

SunParams FittedModel::posterior_at_train() const { return posterior_->marginal(observations().inputs); }

std::vector<SunParams> FittedModel::predict(const Matrix& xstar) const {
    if (xstar.cols() != posterior_->input_dim()) throw InputError("predict: input dimension mismatch");
    const Vector mu = posterior_->mean(xstar);
    const Vector var = posterior_->cov_diag(xstar);
    const Matrix b = posterior_->skew_cov(xstar);
    std::vector<SunParams> out;
    out.reserve(static_cast<std::size_t>(xstar.rows()));
    for (Index i = 0; i < xstar.rows(); ++i)
        out.push_back(SunParams::from_skew_cov(mu.segment(i, 1), Matrix::Constant(1, 1, std::max(var(i), 0.0)),
                                               b.row(i), posterior_->gamma(), posterior_->gamma_mat()));
    return out;
}

SunParams FittedModel::predict_joint(const Matrix& xstar) const {
    if (xstar.cols() != posterior_->input_dim()) throw InputError("predict: input dimension mismatch");
    return posterior_->marginal(xstar);
}

double FittedModel::log_marginal_likelihood(MarginalMode mode) const {
    const double num = log_cdf(posterior_->gamma(), posterior_->gamma_mat(), mode, options_.block_size,
                               options_.partition_seed, options_.cdf_method);
    const double den = log_cdf(prior_->gamma(), prior_->gamma_mat(), mode, options_.block_size,
                               options_.partition_seed, options_.cdf_method);
    return log_evidence_ + num - den;
}

Matrix FittedModel::trunc_draws(Index m) const {
    const Index s = posterior_->latent_dim();
    if (m < 0) throw InputError("trunc_draws: negative count");
    if (s == 0) return Matrix(m, 0);
    const Index have = draws_->rows();
    if (m <= have) return draws_->topRows(m);
    LinEssChain ext = *chain_;
    Matrix out(m, s);
    out.topRows(have) = *draws_;
    out.bottomRows(m - have) = ext.sample(m - have);
    return out;
}

Matrix FittedModel::solved_draws(Index m) const {
    if (m <= draws_->rows()) return gamma_solve_->leftCols(m);
    return gamma_chol_->solve(trunc_draws(m).transpose());
}

Matrix FittedModel::sample_latent(const Matrix& xstar, Index m, std::uint64_t seed) const {
    if (xstar.cols() != posterior_->input_dim()) throw InputError("sample_latent: input dimension mismatch");
    if (m < 1) throw InputError("sample_latent: m must be >= 1");
    const Index q = xstar.rows(), s = posterior_->latent_dim();
    const Matrix omega = symmetrize(posterior_->cov(xstar, xstar));
    Matrix resid = omega;
    Matrix f(q, m);
    f.colwise() = posterior_->mean(xstar);
    if (s > 0) {
        const Matrix b = posterior_->skew_cov(xstar);  // q x s
        f.noalias() += b * solved_draws(m);
        resid = symmetrize(omega - b * gamma_chol_->solve(b.transpose()));
    }
    const Matrix l = psd_factor(resid, "predictive residual covariance");
    Matrix eps(q, m);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (Index j = 0; j < q; ++j) {
        std::mt19937_64 rng(column_seed(seed, j));
        for (Index k = 0; k < m; ++k) eps(j, k) = nd(rng);
    }
    f.noalias() += l.triangularView<Eigen::Lower>() * eps;
    return f.transpose();
}

Matrix FittedModel::sample_marginals(const Matrix& xstar, Index m, std::uint64_t seed) const {
    if (xstar.cols() != posterior_->input_dim()) throw InputError("sample_marginals: input dimension mismatch");
    if (m < 1) throw InputError("sample_marginals: m must be >= 1");
    const Index q = xstar.rows(), s = posterior_->latent_dim();
    Vector resid = posterior_->cov_diag(xstar);
    Matrix f(q, m);
    f.colwise() = posterior_->mean(xstar);
    if (s > 0) {
        const Matrix b = posterior_->skew_cov(xstar);
        f.noalias() += b * solved_draws(m);
        resid -= (b * gamma_chol_->solve(b.transpose())).diagonal();
    }
    std::normal_distribution<double> nd(0.0, 1.0);
    for (Index j = 0; j < q; ++j) {
        const double sd = std::sqrt(std::max(resid(j), 0.0));
        std::mt19937_64 rng(column_seed(seed, j));
        for (Index k = 0; k < m; ++k) f(j, k) += sd * nd(rng);
    }
    return f.transpose();
}

Vector FittedModel::posterior_mean(const Matrix& xstar) const {
    if (xstar.cols() != posterior_->input_dim()) throw InputError("posterior_mean: input dimension mismatch");
    Vector mu = posterior_->mean(xstar);
    if (posterior_->latent_dim() > 0) {
        const Index m = std::max<Index>(cached_draws(), 3000);
        mu.noalias() += posterior_->skew_cov(xstar) * solved_draws(m).rowwise().mean();
    }
    return mu;
}

Vector FittedModel::class_probability(const Matrix& xstar) const {
    const Index s = posterior_->latent_dim();
    const Vector mu = posterior_->mean(xstar);
    const Vector var = posterior_->cov_diag(xstar);
    const Matrix b = posterior_->skew_cov(xstar);
    Vector out(xstar.rows());
    if (s + 1 <= 100) {
        const double den = log_cdf(posterior_->gamma(), posterior_->gamma_mat(), options_.cdf_method);
        for (Index i = 0; i < xstar.rows(); ++i) {
            Vector up(s + 1);
            up << posterior_->gamma(), mu(i);
            Matrix cov(s + 1, s + 1);
            cov.topLeftCorner(s, s) = posterior_->gamma_mat();
            cov.bottomLeftCorner(1, s) = b.row(i);
            cov.topRightCorner(s, 1) = b.row(i).transpose();
            cov(s, s) = var(i) + 1.0;
            out(i) = std::exp(log_cdf(up, cov, options_.cdf_method) - den);
        }
        return out;
    }
    // Rao-Blackwellised Monte Carlo over the cached truncated draws.
    const Matrix coef = gamma_chol_->solve(b.transpose()).transpose();  // q x s
    const Matrix solved = solved_draws(std::max<Index>(cached_draws(), 3000));
    const Matrix loc = (b * solved).colwise() + mu;  // q x n_samples
    for (Index i = 0; i < xstar.rows(); ++i) {
        const double rv = std::max(var(i) - coef.row(i).dot(b.row(i)), 0.0);
        const double sd = std::sqrt(rv + 1.0);
        double acc = 0.0;
        for (Index k = 0; k < loc.cols(); ++k) acc += norm_cdf(loc(i, k) / sd);
        out(i) = acc / static_cast<double>(loc.cols());
    }
    return out;
}

}  // namespace skewgp
