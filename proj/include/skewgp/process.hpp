#pragma once

#include "skewgp/common.hpp"
#include "skewgp/kernels.hpp"
#include "skewgp/likelihoods.hpp"
#include "skewgp/sun.hpp"

#include <memory>

namespace skewgp {

/// A SkewGP: f(A) ~ SUN with location mean(A), scale cov(A, A), covariance-scale
/// skewness skew_cov(A) = Cov(f(A), t) and a latent t ~ N(0, Gamma) conditioned
/// on t + gamma > 0 that is shared by every finite set of inputs.
class SkewProcess {
public:
    virtual ~SkewProcess() = default;

    virtual Index input_dim() const = 0;
    virtual Index latent_dim() const = 0;
    virtual Vector mean(const Matrix& a) const = 0;
    virtual Matrix cov(const Matrix& a, const Matrix& b) const = 0;
    virtual Vector cov_diag(const Matrix& a) const;
    virtual Matrix skew_cov(const Matrix& a) const = 0;
    virtual const Vector& gamma() const = 0;
    virtual const Matrix& gamma_mat() const = 0;

    /// Finite-dimensional SUN at the rows of a.
    SunParams marginal(const Matrix& a) const;
};

using ProcessPtr = std::shared_ptr<const SkewProcess>;

/// The prior built from a base kernel, pseudo-points and phases.
class KernelPrior final : public SkewProcess {
public:
    explicit KernelPrior(SkewPriorSpec spec);

    Index input_dim() const override { return spec_.kernel.dim(); }
    Index latent_dim() const override { return spec_.latent_dim; }
    Vector mean(const Matrix& a) const override;
    Matrix cov(const Matrix& a, const Matrix& b) const override;
    Vector cov_diag(const Matrix& a) const override;
    Matrix skew_cov(const Matrix& a) const override;
    const Vector& gamma() const override { return gamma_; }
    const Matrix& gamma_mat() const override { return gamma_mat_; }
    const SkewPriorSpec& spec() const { return spec_; }

private:
    SkewPriorSpec spec_;
    Vector gamma_;
    Matrix gamma_mat_;
};

/// Posterior after a probit-affine block: the latent dimension grows by m_a,
/// location and scale are unchanged.
class ProbitUpdate final : public SkewProcess {
public:
    ProbitUpdate(ProcessPtr parent, const Matrix& x, const ProbitBlock& block);

    Index input_dim() const override { return parent_->input_dim(); }
    Index latent_dim() const override { return gamma_.size(); }
    Vector mean(const Matrix& a) const override { return parent_->mean(a); }
    Matrix cov(const Matrix& a, const Matrix& b) const override { return parent_->cov(a, b); }
    Vector cov_diag(const Matrix& a) const override { return parent_->cov_diag(a); }
    Matrix skew_cov(const Matrix& a) const override;
    const Vector& gamma() const override { return gamma_; }
    const Matrix& gamma_mat() const override { return gamma_mat_; }

private:
    ProcessPtr parent_;
    Matrix x_;
    Matrix w_;
    Vector gamma_;
    Matrix gamma_mat_;
};

/// Posterior after a Gaussian block Y = C f(X) + N(0, R).
class NumericUpdate final : public SkewProcess {
public:
    NumericUpdate(ProcessPtr parent, const Matrix& x, const NumericBlock& block);

    Index input_dim() const override { return parent_->input_dim(); }
    Index latent_dim() const override { return gamma_.size(); }
    Vector mean(const Matrix& a) const override;
    Matrix cov(const Matrix& a, const Matrix& b) const override;
    Vector cov_diag(const Matrix& a) const override;
    Matrix skew_cov(const Matrix& a) const override;
    const Vector& gamma() const override { return gamma_; }
    const Matrix& gamma_mat() const override { return gamma_mat_; }

    /// log phi(Y; C mean(X), C K(X,X) C^T + R).
    double log_evidence() const { return log_evidence_; }

private:
    ProcessPtr parent_;
    Matrix x_;
    Vector alpha_;   // C^T S^-1 (Y - C m_X)
    Matrix v_;       // L_S^-1 C
    Matrix vb_;      // L_S^-1 C B_X
    Vector gamma_;
    Matrix gamma_mat_;
    double log_evidence_ = 0.0;

    Matrix project(const Matrix& a) const;  // L_S^-1 C K(X, a)
};

}  // namespace skewgp
