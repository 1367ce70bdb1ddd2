#include "skewgp/common.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace skewgp {

double norm_pdf(double x) { return std::exp(-0.5 * x * x - 0.5 * kLogTwoPi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_logcdf(double x) {
    if (x > -30.0) return std::log(norm_cdf(x));
    // Asymptotic Mills-ratio expansion; relative error below 1e-10 here.
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - 0.5 * kLogTwoPi - std::log(-x) + std::log(series);
}

double norm_quantile(double p) {
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    if (!(p < 1.0)) return std::numeric_limits<double>::infinity();
    // Acklam's rational approximation followed by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the erfc-based CDF, done on the smaller tail.
    const double e = (p < 0.5) ? norm_cdf(x) - p : (1.0 - p) - norm_cdf(-x);
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

CholeskyResult robust_cholesky(const Matrix& a, double scale, const std::string& what) {
    if (a.rows() != a.cols()) throw InputError(what + ": Cholesky of a non-square matrix");
    CholeskyResult out;
    if (a.rows() == 0) {
        out.llt.compute(a);
        return out;
    }
    if (!a.allFinite()) throw NumericError(what + ": non-finite entries");
    if (scale <= 0.0) scale = std::max(a.diagonal().cwiseAbs().mean(), 1e-300);
    out.llt.compute(a);
    if (out.llt.info() == Eigen::Success) return out;
    Matrix work = a;
    for (double rel = 1e-8; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
        const double jitter = rel * scale;
        work.diagonal() = a.diagonal().array() + jitter;
        out.llt.compute(work);
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jitter;
            return out;
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a), Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << what << " is not positive definite after jitter up to 1e-4*" << scale << " (n=" << a.rows()
        << ", min eigenvalue " << eig.eigenvalues().minCoeff() << ", max eigenvalue "
        << eig.eigenvalues().maxCoeff() << ")";
    throw NumericError(msg.str());
}

Matrix psd_factor(const Matrix& cov, const std::string& what) {
    if (cov.rows() == 0) return Matrix(0, 0);
    return robust_cholesky(symmetrize(cov), -1.0, what).llt.matrixL();
}

Matrix select_rows(const Matrix& m, const std::vector<Index>& idx) {
    Matrix out(static_cast<Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
    return out;
}

Vector select(const Vector& v, const std::vector<Index>& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = v(idx[i]);
    return out;
}

Matrix select_block(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    return out;
}

}  // namespace skewgp
