#include "skewgp/trunc_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace skewgp {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

bool feasible(const Vector& x, const Vector& gamma) { return ((x + gamma).array() > 0.0).all(); }

}  // namespace

Vector feasible_start(const TruncSpec& spec) {
    const Vector& g = spec.gamma;
    if (!g.allFinite()) throw InputError("feasible_start: truncation shifts must be finite");
    if ((g.array() > 1e-6).all()) return Vector::Zero(g.size());
    Vector x0 = (-g.array() + 1.0).max(1.0).matrix();
    if (!((x0 + g).array() >= 1e-6).all()) throw InputError("feasible_start: no feasible starting point found");
    return x0;
}

LinEssChain::LinEssChain(const TruncSpec& spec)
    : gamma_(spec.gamma), rng_(spec.seed), seed_(spec.seed), thin_(std::max(1, spec.thin)) {
    if (spec.gamma_mat.rows() != gamma_.size() || spec.gamma_mat.cols() != gamma_.size())
        throw InputError("LinEssChain: Gamma and gamma sizes differ");
    if (spec.burn_in < 0) throw InputError("LinEssChain: burn_in must be >= 0");
    chol_ = std::make_shared<const Matrix>(psd_factor(spec.gamma_mat, "truncated-normal covariance"));
    x_ = feasible_start(spec);
    nu_.resize(gamma_.size());
    for (int i = 0; i < spec.burn_in; ++i) step();
}

const Vector& LinEssChain::step() {
    const Index s = gamma_.size();
    if (s == 0) return x_;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (Index i = 0; i < s; ++i) nu_(i) = nd(rng_);
    nu_ = chol_->triangularView<Eigen::Lower>() * nu_;

    // Infeasible set of each constraint is one open arc of angles; theta = 0
    // (the current state) lies outside all of them.
    arcs_.clear();
    for (Index i = 0; i < s; ++i) {
        const double a = x_(i), b = nu_(i);
        const double r = std::hypot(a, b);
        if (r == 0.0) continue;
        const double c = -gamma_(i) / r;
        if (c <= -1.0) continue;
        const double alpha = std::acos(std::min(c, 1.0));
        double start = std::atan2(b, a) + alpha;
        start -= kTwoPi * std::floor(start / kTwoPi);
        const double end = start + kTwoPi - 2.0 * alpha;
        if (end > kTwoPi) {
            arcs_.emplace_back(start, kTwoPi);
            arcs_.emplace_back(0.0, end - kTwoPi);
        } else {
            arcs_.emplace_back(start, end);
        }
    }
    std::sort(arcs_.begin(), arcs_.end());

    // Complement of the union of infeasible arcs within [0, 2pi).
    std::vector<std::pair<double, double>> segs;
    double cursor = 0.0;
    for (const auto& [lo, hi] : arcs_) {
        if (lo > cursor) segs.emplace_back(cursor, lo);
        cursor = std::max(cursor, hi);
    }
    if (cursor < kTwoPi) segs.emplace_back(cursor, kTwoPi);
    double total = 0.0;
    for (const auto& [lo, hi] : segs) total += hi - lo;

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector cand(s);
    bool accepted = false;
    if (total > 1e-12) {
        for (int attempt = 0; attempt < 20 && !accepted; ++attempt) {
            double u = unif(rng_) * total;
            double theta = segs.back().second;
            for (const auto& [lo, hi] : segs) {
                if (u < hi - lo) {
                    theta = lo + u;
                    break;
                }
                u -= hi - lo;
            }
            cand = x_ * std::cos(theta) + nu_ * std::sin(theta);
            if (feasible(cand, gamma_))
                accepted = true;
            else
                ++stats_.angle_redraws;
        }
    }
    if (!accepted) {
        // Shrinking bracket on the same ellipse; terminates at theta = 0 at worst.
        ++stats_.bracket_fallbacks;
        double theta = unif(rng_) * kTwoPi;
        double lo = theta - kTwoPi, hi = theta;
        for (int k = 0; k < 200 && !accepted; ++k) {
            cand = x_ * std::cos(theta) + nu_ * std::sin(theta);
            if (feasible(cand, gamma_)) {
                accepted = true;
                break;
            }
            if (theta < 0.0)
                lo = theta;
            else
                hi = theta;
            theta = lo + unif(rng_) * (hi - lo);
        }
        if (!accepted) cand = x_;
    }
    x_ = cand;
    ++stats_.ellipses;
    ++stats_.steps;
    return x_;
}

Matrix LinEssChain::sample(Index m) {
    if (m < 0) throw InputError("LinEssChain::sample: negative sample count");
    Matrix out(m, gamma_.size());
    for (Index i = 0; i < m; ++i) {
        for (int t = 0; t < thin_; ++t) step();
        out.row(i) = x_.transpose();
    }
    return out;
}

std::string LinEssChain::rng_state() const {
    std::ostringstream os;
    os << rng_;
    return os.str();
}

void LinEssChain::restore(const Vector& x, const std::string& rng_state, const ChainStats& stats) {
    if (x.size() != gamma_.size()) throw InputError("LinEssChain::restore: state dimension mismatch");
    if (!feasible(x, gamma_)) throw InputError("LinEssChain::restore: state violates the truncation");
    std::istringstream is(rng_state);
    is >> rng_;
    if (!is) throw InputError("LinEssChain::restore: malformed engine state");
    x_ = x;
    stats_ = stats;
}

Matrix liness_sample(const TruncSpec& spec, Index m) {
    if (m < 1) throw InputError("liness_sample: m must be >= 1");
    LinEssChain chain(spec);
    return chain.sample(m);
}

Matrix trunc_second_moment(const Matrix& samples) {
    if (samples.rows() == 0) return Matrix::Zero(samples.cols(), samples.cols());
    return samples.transpose() * samples / static_cast<double>(samples.rows());
}

double gelman_rubin(const std::vector<Matrix>& chains) {
    if (chains.size() < 2) throw InputError("gelman_rubin: need at least two chains");
    const Index n = chains.front().rows();
    const Index s = chains.front().cols();
    for (const auto& c : chains)
        if (c.rows() != n || c.cols() != s) throw InputError("gelman_rubin: chains differ in shape");
    if (n < 2) throw InputError("gelman_rubin: chains need at least two draws");
    const double j = static_cast<double>(chains.size());
    double worst = 1.0;
    for (Index k = 0; k < s; ++k) {
        Vector means(static_cast<Index>(chains.size()));
        double w = 0.0;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            const auto col = chains[c].col(k);
            const double mu = col.mean();
            means(static_cast<Index>(c)) = mu;
            w += (col.array() - mu).square().sum() / static_cast<double>(n - 1);
        }
        w /= j;
        if (w <= 0.0) continue;
        const double b_over_n = (means.array() - means.mean()).square().sum() / (j - 1.0);
        const double var_plus = (static_cast<double>(n - 1) / n) * w + b_over_n;
        worst = std::max(worst, std::sqrt(var_plus / w));
    }
    return worst;
}

}  // namespace skewgp
