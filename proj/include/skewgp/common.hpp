#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed or inconsistent caller input (CLI exit code 2).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure such as a matrix that stays indefinite after jitter (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogTwoPi = 1.83787706640934548356;
inline constexpr double kScaleFloor = 1e-12;

// Standard normal helpers.
double norm_pdf(double x);
double norm_cdf(double x);
/// log Phi(x), accurate far into the lower tail.
double norm_logcdf(double x);
/// Inverse of Phi on (0, 1).
double norm_quantile(double p);

/// Result of a jittered Cholesky factorization.
struct CholeskyResult {
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;  // absolute amount added to the diagonal
};

/// Cholesky factorization that first tries the matrix as given and then adds
/// jitter = 1e-8 * scale to the diagonal, growing x10 up to 1e-4 * scale.
/// `scale` defaults to the mean absolute diagonal. Throws NumericError with
/// a condition diagnostic when every attempt fails.
CholeskyResult robust_cholesky(const Matrix& a, double scale = -1.0, const std::string& what = "matrix");

/// Lower Cholesky factor of a positive semidefinite covariance (jittered as needed).
Matrix psd_factor(const Matrix& cov, const std::string& what = "covariance");

/// Symmetric part (A + A^T) / 2.
inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Rows of `m` indexed by `idx`.
Matrix select_rows(const Matrix& m, const std::vector<Index>& idx);
Vector select(const Vector& v, const std::vector<Index>& idx);
Matrix select_block(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols);

/// Draws an m x p matrix of iid standard normals from a seeded engine.
template <typename Rng>
Matrix standard_normal(Rng& rng, Index rows, Index cols);

}  // namespace skewgp

#include <random>

namespace skewgp {

template <typename Rng>
Matrix standard_normal(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = nd(rng);
    return out;
}

}  // namespace skewgp
