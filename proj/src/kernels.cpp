#include "skewgp/kernels.hpp"

#include <cmath>

namespace skewgp {

void KernelSpec::validate() const {
    if (lengthscales.size() == 0) throw InputError("kernel: lengthscales must be nonempty");
    if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite())
        throw InputError("kernel: lengthscales must be positive");
    if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("kernel: variance must be positive");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw InputError("kernel: noise_variance must be nonnegative");
}

void SkewPriorSpec::validate() const {
    kernel.validate();
    if (latent_dim < 0) throw InputError("prior: latent_dim must be >= 0");
    if (pseudo_points.rows() != latent_dim)
        throw InputError("prior: number of pseudo-points must equal latent_dim");
    if (latent_dim > 0 && pseudo_points.cols() != kernel.dim())
        throw InputError("prior: pseudo-point dimension does not match lengthscales");
    if (phase.size() != latent_dim) throw InputError("prior: phase must have latent_dim entries");
    for (Index i = 0; i < phase.size(); ++i)
        if (phase(i) != 1.0 && phase(i) != -1.0) throw InputError("prior: phase entries must be +1 or -1");
}

SkewPriorSpec SkewPriorSpec::gaussian(KernelSpec kernel, double mean_constant) {
    SkewPriorSpec s;
    s.pseudo_points = Matrix(0, kernel.dim());
    s.kernel = std::move(kernel);
    s.phase = Vector(0);
    s.latent_dim = 0;
    s.mean_constant = mean_constant;
    return s;
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& x1, const Matrix& x2) {
    const Index d = spec.dim();
    if (x1.cols() != d || x2.cols() != d)
        throw InputError("kernel_matrix: input dimension does not match lengthscales");
    // Explicit differences keep the diagonal exactly sigma^2 and K(X,X) exactly symmetric.
    const Matrix a = (x1.array().rowwise() / spec.lengthscales.transpose().array()).transpose();
    const Matrix b = (x2.array().rowwise() / spec.lengthscales.transpose().array()).transpose();
    Matrix out(x1.rows(), x2.rows());
    for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < a.cols(); ++i)
            out(i, j) = spec.variance * std::exp(-0.5 * (a.col(i) - b.col(j)).squaredNorm());
    return out;
}

Matrix assemble_m(const Matrix& omega_bar, const Matrix& delta, const Matrix& gamma_mat) {
    const Index p = omega_bar.rows();
    const Index s = gamma_mat.rows();
    Matrix m(s + p, s + p);
    m.topLeftCorner(s, s) = gamma_mat;
    m.topRightCorner(s, p) = delta.transpose();
    m.bottomLeftCorner(p, s) = delta;
    m.bottomRightCorner(p, p) = omega_bar;
    return m;
}

PriorBlocks build_prior(const SkewPriorSpec& spec, const Matrix& x) {
    spec.validate();
    PriorBlocks out;
    const Index n = x.rows();
    const Index s = spec.latent_dim;
    out.xi = Vector::Constant(n, spec.mean_constant);
    out.omega = kernel_matrix(spec.kernel, x, x);
    const double var = spec.kernel.variance;
    if (s == 0) {
        out.delta = Matrix(n, 0);
        out.gamma = Vector(0);
        out.gamma_mat = Matrix(0, 0);
        return out;
    }
    const auto phase = spec.phase.asDiagonal();
    out.delta = kernel_matrix(spec.kernel, x, spec.pseudo_points) / var * phase;
    out.gamma_mat = phase * (kernel_matrix(spec.kernel, spec.pseudo_points, spec.pseudo_points) / var) * phase;
    out.gamma = Vector::Zero(s);
    const Matrix m = assemble_m(out.omega / var, out.delta, out.gamma_mat);
    robust_cholesky(m, 1.0, "prior matrix M");
    return out;
}

}  // namespace skewgp
