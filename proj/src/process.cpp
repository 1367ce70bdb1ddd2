#include "skewgp/process.hpp"

namespace skewgp {

Vector SkewProcess::cov_diag(const Matrix& a) const {
    Vector out(a.rows());
    for (Index i = 0; i < a.rows(); ++i) out(i) = cov(a.row(i), a.row(i))(0, 0);
    return out;
}

SunParams SkewProcess::marginal(const Matrix& a) const {
    return SunParams::from_skew_cov(mean(a), symmetrize(cov(a, a)), skew_cov(a), gamma(), gamma_mat());
}

KernelPrior::KernelPrior(SkewPriorSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const Index s = spec_.latent_dim;
    gamma_ = Vector::Zero(s);
    if (s > 0) {
        const auto phase = spec_.phase.asDiagonal();
        gamma_mat_ = phase * (kernel_matrix(spec_.kernel, spec_.pseudo_points, spec_.pseudo_points) /
                              spec_.kernel.variance) *
                     phase;
    } else {
        gamma_mat_ = Matrix(0, 0);
    }
}

Vector KernelPrior::mean(const Matrix& a) const { return Vector::Constant(a.rows(), spec_.mean_constant); }

Matrix KernelPrior::cov(const Matrix& a, const Matrix& b) const { return kernel_matrix(spec_.kernel, a, b); }

Vector KernelPrior::cov_diag(const Matrix& a) const {
    if (a.cols() != input_dim()) throw InputError("kernel prior: input dimension mismatch");
    return Vector::Constant(a.rows(), spec_.kernel.variance);
}

Matrix KernelPrior::skew_cov(const Matrix& a) const {
    if (spec_.latent_dim == 0) {
        if (a.cols() != input_dim()) throw InputError("kernel prior: input dimension mismatch");
        return Matrix(a.rows(), 0);
    }
    // D_Omega Delta with Delta = Kbar(a, U) L and D_Omega = sigma.
    return kernel_matrix(spec_.kernel, a, spec_.pseudo_points) * spec_.phase.asDiagonal() /
           std::sqrt(spec_.kernel.variance);
}

ProbitUpdate::ProbitUpdate(ProcessPtr parent, const Matrix& x, const ProbitBlock& block)
    : parent_(std::move(parent)), x_(x), w_(block.w) {
    if (block.w.cols() != x.rows()) throw InputError("probit update: W must have one column per input");
    const Index s = parent_->latent_dim(), m = block.size();
    const Matrix bx = parent_->skew_cov(x);
    const Matrix kx = parent_->cov(x, x);
    gamma_.resize(s + m);
    gamma_ << parent_->gamma(), block.z + block.w * parent_->mean(x);
    gamma_mat_.resize(s + m, s + m);
    gamma_mat_.topLeftCorner(s, s) = parent_->gamma_mat();
    const Matrix cross = block.w * bx;  // m x s
    gamma_mat_.bottomLeftCorner(m, s) = cross;
    gamma_mat_.topRightCorner(s, m) = cross.transpose();
    gamma_mat_.bottomRightCorner(m, m) = symmetrize(block.w * kx * block.w.transpose() + block.sigma);
}

Matrix ProbitUpdate::skew_cov(const Matrix& a) const {
    const Index s = parent_->latent_dim();
    Matrix out(a.rows(), gamma_.size());
    out.leftCols(s) = parent_->skew_cov(a);
    out.rightCols(w_.rows()) = parent_->cov(a, x_) * w_.transpose();
    return out;
}

NumericUpdate::NumericUpdate(ProcessPtr parent, const Matrix& x, const NumericBlock& block)
    : parent_(std::move(parent)), x_(x) {
    if (block.c.cols() != x.rows()) throw InputError("numeric update: C must have one column per input");
    const Matrix kx = parent_->cov(x, x);
    const Matrix s_mat = symmetrize(block.c * kx * block.c.transpose() + block.r);
    const CholeskyResult chol = robust_cholesky(s_mat, -1.0, "C K C^T + R");
    const auto l = chol.llt.matrixL();
    v_ = l.solve(block.c);
    const Vector resid = l.solve(block.y - block.c * parent_->mean(x));
    alpha_ = v_.transpose() * resid;
    vb_ = v_ * parent_->skew_cov(x);
    gamma_ = parent_->gamma() + vb_.transpose() * resid;
    gamma_mat_ = symmetrize(parent_->gamma_mat() - vb_.transpose() * vb_);
    log_evidence_ = -0.5 * resid.squaredNorm() - chol.llt.matrixLLT().diagonal().array().log().sum() -
                    0.5 * static_cast<double>(block.size()) * kLogTwoPi;
}

Matrix NumericUpdate::project(const Matrix& a) const { return v_ * parent_->cov(x_, a); }

Vector NumericUpdate::mean(const Matrix& a) const { return parent_->mean(a) + parent_->cov(a, x_) * alpha_; }

Matrix NumericUpdate::cov(const Matrix& a, const Matrix& b) const {
    const Matrix pa = project(a);
    if (&a == &b) return parent_->cov(a, a) - pa.transpose() * pa;
    return parent_->cov(a, b) - pa.transpose() * project(b);
}

Vector NumericUpdate::cov_diag(const Matrix& a) const {
    return parent_->cov_diag(a) - project(a).colwise().squaredNorm().transpose();
}

Matrix NumericUpdate::skew_cov(const Matrix& a) const { return parent_->skew_cov(a) - project(a).transpose() * vb_; }

}  // namespace skewgp
