#pragma once

// Independent reference computations used by the tests: quadrature, plain
// Monte Carlo, rejection sampling and two-sample KS. Nothing here calls the
// library's CDF or sampler code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Composite Gauss-Legendre (5 nodes per panel) on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 400) {
    static const double node[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                   0.9061798459386640};
    static const double weight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int k = 0; k < 5; ++k) total += weight[k] * f(mid + 0.5 * h * node[k]);
    }
    return 0.5 * h * total;
}

/// Tensor-product rule on [a1,b1] x [a2,b2].
inline double integrate2(const std::function<double(double, double)>& f, double a1, double b1, double a2, double b2,
                         int panels = 120) {
    return integrate([&](double x) { return integrate([&](double y) { return f(x, y); }, a2, b2, panels); }, a1, b1,
                     panels);
}

/// Multivariate normal log density, by direct Cholesky (for oracles only).
inline double mvn_logpdf(const Vector& x, const Vector& mean, const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    const Vector r = llt.matrixL().solve(x - mean);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * r.squaredNorm() - 0.5 * logdet - 0.5 * x.size() * std::log(2.0 * M_PI);
}

inline Matrix mvn_draws(std::mt19937_64& rng, const Vector& mean, const Matrix& cov, int m) {
    Eigen::LLT<Matrix> llt(cov);
    const Matrix l = llt.matrixL();
    std::normal_distribution<double> nd;
    Matrix out(m, mean.size());
    Vector e(mean.size());
    for (int i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = nd(rng);
        out.row(i) = (mean + l * e).transpose();
    }
    return out;
}

/// Rejection sampler for N(0, cov) restricted to x + shift > 0.
inline Matrix rejection_trunc(std::mt19937_64& rng, const Vector& shift, const Matrix& cov, int m) {
    Eigen::LLT<Matrix> llt(cov);
    const Matrix l = llt.matrixL();
    std::normal_distribution<double> nd;
    Matrix out(m, shift.size());
    Vector e(shift.size());
    int got = 0;
    while (got < m) {
        for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = nd(rng);
        const Vector x = l * e;
        if (((x + shift).array() > 0.0).all()) out.row(got++) = x.transpose();
    }
    return out;
}

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// Plain Monte Carlo estimate of P(X <= upper), X ~ N(0, cov).
inline Estimate mc_orthant(std::mt19937_64& rng, const Vector& upper, const Matrix& cov, int m) {
    const Matrix x = mvn_draws(rng, Vector::Zero(upper.size()), cov, m);
    int hits = 0;
    for (int i = 0; i < m; ++i)
        if ((x.row(i).transpose().array() <= upper.array()).all()) ++hits;
    const double p = static_cast<double>(hits) / m;
    return {p, std::sqrt(std::max(p * (1.0 - p), 1e-300) / m)};
}

/// Mean and batch-means standard error of a (possibly autocorrelated) series.
inline Estimate batch_mean(const Vector& x, int batches = 50) {
    const Eigen::Index len = x.size() / batches;
    Vector means(batches);
    for (int b = 0; b < batches; ++b) means(b) = x.segment(b * len, len).mean();
    const double mu = means.mean();
    const double var = (means.array() - mu).square().sum() / (batches - 1);
    return {x.mean(), std::sqrt(var / batches)};
}

/// Self-normalised importance-sampling style mean with iid standard error.
inline Estimate iid_mean(const Vector& x) {
    const double mu = x.mean();
    const double var = (x.array() - mu).square().sum() / (x.size() - 1);
    return {mu, std::sqrt(var / x.size())};
}

/// Asymptotic p-value of the two-sample Kolmogorov-Smirnov statistic.
inline double ks_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(p, 0.0, 1.0);
}

inline Matrix random_spd(std::mt19937_64& rng, int n, double ridge = 0.3) {
    std::normal_distribution<double> nd;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    Matrix s = a * a.transpose() / n + ridge * Matrix::Identity(n, n);
    return 0.5 * (s + s.transpose());
}

inline Matrix to_correlation(const Matrix& s) {
    const Vector d = s.diagonal().array().sqrt().inverse();
    return d.asDiagonal() * s * d.asDiagonal();
}

/// P(X <= a) for X ~ N(0, c), dimension 0, 1 or 2, by direct quadrature.
inline double orthant(const Vector& a, const Matrix& c) {
    if (a.size() == 0) return 1.0;
    if (a.size() == 1) return Phi(a(0) / std::sqrt(c(0, 0)));
    const double s1 = std::sqrt(c(0, 0));
    const double beta = c(1, 0) / c(0, 0);
    const double sc = std::sqrt(c(1, 1) - beta * c(1, 0));
    return integrate([&](double x) { return phi(x / s1) / s1 * Phi((a(1) - beta * x) / sc); }, -12.0 * s1,
                     std::min(a(0), 12.0 * s1), 300);
}

/// Trivariate orthant by quadrature over the first coordinate of the 2D rule.
inline double orthant3(const Vector& a, const Matrix& c) {
    const double s1 = std::sqrt(c(0, 0));
    const Vector beta = c.block(1, 0, 2, 1) / c(0, 0);
    const Matrix cc = c.block(1, 1, 2, 2) - beta * c.block(0, 1, 1, 2);
    return integrate([&](double x) { return phi(x / s1) / s1 * orthant(Vector(a.tail(2) - beta * x), cc); },
                     -12.0 * s1, std::min(a(0), 12.0 * s1), 200);
}

/// SUN density written straight from its definition with correlation-scale
/// Delta (p and s at most 2).
struct SunOracle {
    Vector xi;
    Matrix omega, delta;
    Vector gamma;
    Matrix gamma_mat;

    double pdf(const Vector& z) const {
        const Vector d = omega.diagonal().array().sqrt();
        const Matrix dinv = d.cwiseInverse().asDiagonal();
        const Matrix obar = dinv * omega * dinv;
        const Matrix obar_inv = obar.inverse();
        const Vector arg = gamma + delta.transpose() * obar_inv * dinv * (z - xi);
        const Matrix cov = gamma_mat - delta.transpose() * obar_inv * delta;
        const double dens = std::exp(mvn_logpdf(z, xi, omega));
        return dens * orthant(arg, cov) / orthant(gamma, gamma_mat);
    }

    /// Law of w^T z: again SUN by affine closure.
    SunOracle project(const Vector& w) const {
        SunOracle o;
        o.xi = Vector::Constant(1, w.dot(xi));
        const double var = w.dot(omega * w);
        o.omega = Matrix::Constant(1, 1, var);
        const Vector d = omega.diagonal().array().sqrt();
        o.delta = (w.transpose() * d.asDiagonal() * delta) / std::sqrt(var);
        o.gamma = gamma;
        o.gamma_mat = gamma_mat;
        return o;
    }

    struct Moments {
        double mean, var, skew;
    };
    /// Moments of a univariate oracle by quadrature over +-12 sd.
    Moments moments() const {
        const double m = xi(0), sd = std::sqrt(omega(0, 0));
        auto f = [&](double x) { return pdf(Vector::Constant(1, x)); };
        const double a = m - 12 * sd, b = m + 12 * sd;
        const double mass = integrate(f, a, b, 300);
        const double mu = integrate([&](double x) { return x * f(x); }, a, b, 300) / mass;
        const double v = integrate([&](double x) { return (x - mu) * (x - mu) * f(x); }, a, b, 300) / mass;
        const double t = integrate([&](double x) { return std::pow(x - mu, 3) * f(x); }, a, b, 300) / mass;
        return {mu, v, t / std::pow(v, 1.5)};
    }
};

/// Gauss-Hermite rule for E[g(Z)], Z ~ N(0, 1) (probabilists' weights).
struct Hermite {
    Vector nodes, weights;
    explicit Hermite(int n) {
        Matrix j = Matrix::Zero(n, n);
        for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(i));
        Eigen::SelfAdjointEigenSolver<Matrix> es(j);
        nodes = es.eigenvalues();
        weights = es.eigenvectors().row(0).transpose().array().square();
    }
};

/// E[g(f)] for f ~ N(mean, cov) of dimension <= 3 by tensor Gauss-Hermite.
inline double gauss_expect(const std::function<double(const Vector&)>& g, const Vector& mean, const Matrix& cov,
                           int nodes = 40) {
    const Hermite h(nodes);
    const int d = static_cast<int>(mean.size());
    Eigen::LLT<Matrix> llt(cov);
    const Matrix l = llt.matrixL();
    std::vector<int> idx(d, 0);
    double total = 0.0;
    Vector z(d);
    while (true) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) z(k) = h.nodes(idx[k]), w *= h.weights(idx[k]);
        total += w * g(mean + l * z);
        int k = 0;
        while (k < d && ++idx[k] == nodes) idx[k++] = 0;
        if (k == d) break;
    }
    return total;
}

/// Importance sampling from the prior: E[h(f) | data] = E[h L] / E[L].
struct PosteriorIS {
    double mean = 0.0, mean_se = 0.0;
    double evidence = 0.0, evidence_se = 0.0;
};

inline PosteriorIS prior_importance(std::mt19937_64& rng, const Matrix& prior_draws,
                                    const std::function<double(const Vector&)>& likelihood,
                                    const std::function<double(const Vector&)>& h) {
    const auto m = prior_draws.rows();
    Vector w(m), hv(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Vector f = prior_draws.row(i).transpose();
        w(i) = likelihood(f);
        hv(i) = h(f);
    }
    (void)rng;
    PosteriorIS out;
    const double wbar = w.mean();
    out.evidence = wbar;
    out.evidence_se = std::sqrt((w.array() - wbar).square().sum() / (m - 1) / m);
    out.mean = (w.array() * hv.array()).sum() / w.sum();
    // delta-method standard error of the ratio estimator
    const Eigen::ArrayXd r = w.array() * (hv.array() - out.mean);
    out.mean_se = std::sqrt(r.square().sum() / (m - 1) / m) / wbar;
    return out;
}

}  // namespace oracle
