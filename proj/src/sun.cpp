#include "skewgp/sun.hpp"

#include "skewgp/kernels.hpp"
#include "skewgp/trunc_sampler.hpp"

#include <cmath>
#include <random>

namespace skewgp {

namespace {

// Seed of the Gaussian (r0) stream, kept apart from the truncated-normal chain.
std::uint64_t normal_stream(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

std::vector<Index> complement(Index p, const std::vector<Index>& idx) {
    std::vector<char> used(static_cast<std::size_t>(p), 0);
    for (Index i : idx) {
        if (i < 0 || i >= p) throw InputError("sun: index out of range");
        if (used[static_cast<std::size_t>(i)]) throw InputError("sun: repeated index");
        used[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<Index> rest;
    for (Index i = 0; i < p; ++i)
        if (!used[static_cast<std::size_t>(i)]) rest.push_back(i);
    return rest;
}

}  // namespace

Vector SunParams::scale() const { return omega.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseMax(kScaleFloor); }

Matrix SunParams::skew_cov() const { return scale().asDiagonal() * delta; }

void SunParams::check_sizes() const {
    const Index p = dim(), s = latent_dim();
    if (p < 1) throw InputError("sun: dimension p must be >= 1");
    if (omega.rows() != p || omega.cols() != p) throw InputError("sun: Omega must be p x p");
    if (delta.rows() != p || delta.cols() != s) throw InputError("sun: Delta must be p x s");
    if (gamma_mat.rows() != s || gamma_mat.cols() != s) throw InputError("sun: Gamma must be s x s");
    if (!xi.allFinite() || !omega.allFinite() || !delta.allFinite() || !gamma.allFinite() || !gamma_mat.allFinite())
        throw InputError("sun: parameters must be finite");
}

void SunParams::validate() const {
    check_sizes();
    robust_cholesky(omega, -1.0, "SUN Omega");
    if (latent_dim() > 0) {
        robust_cholesky(gamma_mat, -1.0, "SUN Gamma");
        const Vector inv = scale().cwiseInverse();
        robust_cholesky(assemble_m(inv.asDiagonal() * omega * inv.asDiagonal(), delta, gamma_mat), 1.0,
                        "SUN matrix M");
    }
}

SunParams SunParams::from_skew_cov(Vector xi, Matrix omega, const Matrix& skew_cov, Vector gamma, Matrix gamma_mat) {
    SunParams p;
    p.xi = std::move(xi);
    p.omega = std::move(omega);
    p.gamma = std::move(gamma);
    p.gamma_mat = std::move(gamma_mat);
    p.delta = p.scale().cwiseInverse().asDiagonal() * skew_cov;
    return p;
}

double sun_log_pdf(const SunParams& params, const Vector& z, CdfMethod method) {
    params.check_sizes();
    if (z.size() != params.dim()) throw InputError("sun_log_pdf: z has the wrong length");
    const CholeskyResult chol = robust_cholesky(params.omega, -1.0, "SUN Omega");
    const auto l = chol.llt.matrixL();
    const Vector r = z - params.xi;
    const Vector w = l.solve(r);
    const double logdet = 2.0 * chol.llt.matrixLLT().diagonal().array().log().sum();
    double out = -0.5 * w.squaredNorm() - 0.5 * logdet - 0.5 * static_cast<double>(z.size()) * kLogTwoPi;
    if (params.latent_dim() == 0) return out;
    // Delta^T Omega_bar^-1 D^-1 = B^T Omega^-1 and Delta^T Omega_bar^-1 Delta = B^T Omega^-1 B.
    const Matrix v = l.solve(params.skew_cov());
    const Vector shift = params.gamma + v.transpose() * w;
    const Matrix cond = symmetrize(params.gamma_mat - v.transpose() * v);
    CdfRequest num;
    num.upper = shift;
    num.cov = cond;
    num.method = method;
    num.check_points = 0;
    CdfRequest den = num;
    den.upper = params.gamma;
    den.cov = params.gamma_mat;
    out += mvn_cdf(num).log_probability - mvn_cdf(den).log_probability;
    return out;
}

SunParams sun_marginal(const SunParams& params, const std::vector<Index>& keep) {
    params.check_sizes();
    if (keep.empty()) throw InputError("sun_marginal: keep must be nonempty");
    complement(params.dim(), keep);
    SunParams out;
    out.xi = select(params.xi, keep);
    out.omega = select_block(params.omega, keep, keep);
    out.delta = select_rows(params.delta, keep);
    out.gamma = params.gamma;
    out.gamma_mat = params.gamma_mat;
    return out;
}

SunParams sun_conditional(const SunParams& params, const std::vector<Index>& observed, const Vector& values) {
    params.check_sizes();
    if (observed.empty()) throw InputError("sun_conditional: observed set must be nonempty");
    if (static_cast<Index>(observed.size()) != values.size())
        throw InputError("sun_conditional: one value per observed index required");
    const std::vector<Index> rest = complement(params.dim(), observed);
    if (rest.empty()) throw InputError("sun_conditional: observed set must be a strict subset");
    const Matrix b = params.skew_cov();
    const Matrix o11 = select_block(params.omega, observed, observed);
    const Matrix o21 = select_block(params.omega, rest, observed);
    const Matrix b1 = select_rows(b, observed);
    const Vector r1 = values - select(params.xi, observed);
    Eigen::LLT<Matrix> llt(o11);
    if (llt.info() != Eigen::Success) throw NumericError("sun_conditional: Omega_11 is singular");
    const Matrix a = llt.solve(o21.transpose()).transpose();  // Omega_21 Omega_11^-1
    const Vector alpha = llt.solve(r1);
    const Matrix g = llt.solve(b1);                           // Omega_11^-1 B_1
    return SunParams::from_skew_cov(select(params.xi, rest) + o21 * alpha,
                                    symmetrize(select_block(params.omega, rest, rest) - a * o21.transpose()),
                                    select_rows(b, rest) - a * b1, params.gamma + b1.transpose() * alpha,
                                    symmetrize(params.gamma_mat - b1.transpose() * g));
}

SampleBatch sun_sample(const SunParams& params, Index m, std::uint64_t seed, const std::optional<Matrix>& reuse) {
    params.check_sizes();
    if (m < 1) throw InputError("sun_sample: m must be >= 1");
    const Index p = params.dim(), s = params.latent_dim();
    SampleBatch out;
    out.seed = seed;
    const Matrix b = params.skew_cov();
    Matrix resid_cov = params.omega;
    Matrix coef(p, s);  // B Gamma^-1
    if (s > 0) {
        const CholeskyResult gchol = robust_cholesky(params.gamma_mat, -1.0, "SUN Gamma");
        coef = gchol.llt.solve(b.transpose()).transpose();
        resid_cov = symmetrize(params.omega - coef * b.transpose());
        if (reuse) {
            if (reuse->rows() != m || reuse->cols() != s)
                throw InputError("sun_sample: reused truncated draws must be m x s");
            out.trunc_draws = *reuse;
        } else {
            TruncSpec spec;
            spec.gamma = params.gamma;
            spec.gamma_mat = params.gamma_mat;
            spec.seed = seed;
            out.trunc_draws = liness_sample(spec, m);
        }
    } else {
        out.trunc_draws = Matrix(m, 0);
    }
    const Matrix l = psd_factor(resid_cov, "SUN residual covariance Omega - B Gamma^-1 B^T");
    std::mt19937_64 rng(normal_stream(seed));
    const Matrix eps = standard_normal(rng, p, m);
    Matrix z = l * eps;
    if (s > 0) z.noalias() += coef * out.trunc_draws.transpose();
    z.colwise() += params.xi;
    out.values = z.transpose();
    return out;
}

Skewness skewness_statistic(const Vector& samples) {
    if (samples.size() < 2) throw InputError("skewness_statistic: need at least two samples");
    const double mu = samples.mean();
    const Eigen::ArrayXd c = samples.array() - mu;
    const double m2 = c.square().mean();
    const double m3 = c.cube().mean();
    if (!(m2 > 0.0)) return {0.0, true};
    return {m3 / std::pow(m2, 1.5), false};
}

}  // namespace skewgp
