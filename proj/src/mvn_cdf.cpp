#include "skewgp/mvn_cdf.hpp"

#include "skewgp/trunc_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace skewgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre half tables (6, 12 and 20 points).
constexpr double kGlW[3][10] = {
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
    {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659, 0.2334925365383547,
     0.2491470458134029},
    {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475, 0.1019301198172404,
     0.1181945319615184, 0.1316886384491766, 0.1420961093183821, 0.1491729864726037, 0.1527533871307259}};
constexpr double kGlX[3][10] = {
    {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
    {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171, -0.3678314989981802,
     -0.1252334085114692},
    {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188, -0.7463319064601508,
     -0.6360536807265150, -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
     -0.07652652113349733}};

// P(X > dh, Y > dk) for a standard bivariate normal with correlation r.
double bvn_upper(double dh, double dk, double r) {
    if (dh == kInf || dk == kInf) return 0.0;
    if (dh == -kInf) return dk == -kInf ? 1.0 : norm_cdf(-dk);
    if (dk == -kInf) return norm_cdf(-dh);
    int ng, lg;
    if (std::abs(r) < 0.3) {
        ng = 0;
        lg = 3;
    } else if (std::abs(r) < 0.75) {
        ng = 1;
        lg = 6;
    } else {
        ng = 2;
        lg = 10;
    }
    double h = dh, k = dk, hk = h * k, bvn = 0.0;
    const double two_pi = 2.0 * kPi;
    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (int i = 0; i < lg; ++i) {
            double sn = std::sin(asr * (kGlX[ng][i] + 1.0) / 2.0);
            bvn += kGlW[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            sn = std::sin(asr * (-kGlX[ng][i] + 1.0) / 2.0);
            bvn += kGlW[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        bvn = bvn * asr / (2.0 * two_pi) + norm_cdf(-h) * norm_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (std::abs(r) < 1.0) {
            const double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 16.0;
            bvn = a * std::exp(-(bs / as + hk) / 2.0) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
            if (hk > -160.0) {
                const double b = std::sqrt(bs);
                bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * norm_cdf(-b / a) * b *
                       (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for (int i = 0; i < lg; ++i) {
                for (int sgn : {1, -1}) {
                    const double xs = std::pow(a * (sgn * kGlX[ng][i] + 1.0), 2);
                    const double rs = std::sqrt(1.0 - xs);
                    const double asr = -(bs / xs + hk) / 2.0;
                    if (asr > -100.0) {
                        bvn += a * kGlW[ng][i] * std::exp(asr) *
                               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                                (1.0 + c * xs * (1.0 + d * xs)));
                    }
                }
            }
            bvn = -bvn / two_pi;
        }
        if (r > 0.0) {
            bvn += norm_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) {
                if (h < 0.0)
                    bvn += norm_cdf(k) - norm_cdf(h);
                else
                    bvn += norm_cdf(-h) - norm_cdf(-k);
            }
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

// E[Z | Z <= b] for a standard normal Z.
double truncated_mean_1d(double b) {
    if (b == kInf) return 0.0;
    return -std::exp(-0.5 * b * b - 0.5 * kLogTwoPi - norm_logcdf(b));
}

// Mean of a standard bivariate normal (correlation r) truncated to x <= h, y <= k.
std::pair<double, double> truncated_mean_2d(double h, double k, double r, double p) {
    if (p < 1e-280 || std::abs(r) >= 1.0) return {truncated_mean_1d(h), truncated_mean_1d(k)};
    const double sr = std::sqrt((1.0 - r) * (1.0 + r));
    const double ph = (h == kInf) ? 0.0 : norm_pdf(h);
    const double pk = (k == kInf) ? 0.0 : norm_pdf(k);
    const double ck = (k == kInf) ? 1.0 : norm_cdf((k - r * h) / sr);
    const double ch = (h == kInf) ? 1.0 : norm_cdf((h - r * k) / sr);
    const double m1 = -(ph * ck + r * pk * ch) / p;
    const double m2 = -(pk * ch + r * ph * ck) / p;
    return {m1, m2};
}

struct Ordered {
    std::vector<Index> perm;
    Matrix chol;   // lower factor of the permuted covariance
    Vector upper;  // permuted limits
    double log_uvc = 0.0;
};

// Genz-Bretz prioritization: at each step pick the remaining variable with the
// smallest conditional probability given truncated means of the earlier ones.
Ordered order_variables(const Vector& upper, const Matrix& cov) {
    const Index m = upper.size();
    Ordered o;
    o.perm.resize(static_cast<std::size_t>(m));
    std::iota(o.perm.begin(), o.perm.end(), Index{0});
    Matrix a = cov;
    Vector b = upper;
    Matrix l = Matrix::Zero(m, m);
    Vector y = Vector::Zero(m);
    const double scale = std::max(cov.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < m; ++i) {
        Index best = i;
        double best_p = kInf;
        for (Index j = i; j < m; ++j) {
            const double v = a(j, j) - l.row(j).head(i).squaredNorm();
            const double s = std::sqrt(std::max(v, kScaleFloor * scale));
            const double mu = l.row(j).head(i).dot(y.head(i));
            const double lp = (b(j) == kInf) ? 0.0 : norm_logcdf((b(j) - mu) / s);
            if (lp < best_p) {
                best_p = lp;
                best = j;
            }
        }
        if (best != i) {
            a.row(i).swap(a.row(best));
            a.col(i).swap(a.col(best));
            std::swap(b(i), b(best));
            l.row(i).swap(l.row(best));
            std::swap(o.perm[static_cast<std::size_t>(i)], o.perm[static_cast<std::size_t>(best)]);
        }
        const double v = a(i, i) - l.row(i).head(i).squaredNorm();
        if (v < -1e-8 * scale) throw NumericError("mvn_cdf: covariance is not positive semidefinite");
        const double lii = std::sqrt(std::max(v, kScaleFloor * scale));
        l(i, i) = lii;
        for (Index r = i + 1; r < m; ++r) l(r, i) = (a(r, i) - l.row(r).head(i).dot(l.row(i).head(i))) / lii;
        const double mu = l.row(i).head(i).dot(y.head(i));
        const double bh = (b(i) == kInf) ? kInf : (b(i) - mu) / lii;
        o.log_uvc += (bh == kInf) ? 0.0 : norm_logcdf(bh);
        y(i) = truncated_mean_1d(bh);
    }
    o.chol = l;
    o.upper = b;
    return o;
}

// Conditioning approximation with 1x1 or 2x2 blocks. Variables are pivoted
// on the fly: the first of each block has the smallest conditional marginal
// probability, the second the smallest bivariate probability jointly with it.
double conditioning_log_prob(const Vector& upper_in, const Matrix& cov, int block) {
    const Index m = upper_in.size();
    Matrix a = cov;
    Vector upper = upper_in;
    Vector shift = Vector::Zero(m);
    double logp = 0.0;
    const double scale = std::max(cov.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    auto sd = [&](Index j) { return std::sqrt(std::max(a(j, j), kScaleFloor * scale)); };
    auto limit = [&](Index j) { return (upper(j) == kInf) ? kInf : (upper(j) - shift(j)) / sd(j); };
    auto swap_in = [&](Index i, Index j) {
        if (i == j) return;
        a.row(i).swap(a.row(j));
        a.col(i).swap(a.col(j));
        std::swap(upper(i), upper(j));
        std::swap(shift(i), shift(j));
    };
    for (Index i = 0; i < m; i += block) {
        Index first = i;
        double best = kInf;
        for (Index j = i; j < m; ++j) {
            const double h = limit(j);
            const double lp = (h == kInf) ? 0.0 : norm_logcdf(h);
            if (lp < best) {
                best = lp;
                first = j;
            }
        }
        swap_in(i, first);
        const Index bs = std::min<Index>(block, m - i);
        const Index rest = m - i - bs;
        Vector e(bs);
        if (bs == 1) {
            const double h = limit(i);
            logp += (h == kInf) ? 0.0 : norm_logcdf(h);
            e(0) = sd(i) * truncated_mean_1d(h);
        } else {
            const double h = limit(i);
            Index second = i + 1;
            double best2 = kInf;
            for (Index j = i + 1; j < m; ++j) {
                const double r = std::clamp(a(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
                const double p = bvn_cdf(h, limit(j), r);
                if (p < best2) {
                    best2 = p;
                    second = j;
                }
            }
            swap_in(i + 1, second);
            const double s1 = sd(i), s2 = sd(i + 1);
            const double r = std::clamp(a(i, i + 1) / (s1 * s2), -1.0, 1.0);
            const double k = limit(i + 1);
            const double p = bvn_cdf(h, k, r);
            logp += (p > 0.0) ? std::log(p) : norm_logcdf(h) + norm_logcdf(k);
            const auto [m1, m2] = truncated_mean_2d(h, k, r, p);
            e(0) = s1 * m1;
            e(1) = s2 * m2;
        }
        if (rest == 0) break;
        const Matrix d = a.block(i, i, bs, bs);
        const Matrix arj = a.block(i + bs, i, rest, bs);
        Eigen::LDLT<Matrix> dl(d);
        const Matrix lr = dl.solve(arj.transpose()).transpose();  // A_RJ D^-1
        shift.tail(rest) += lr * e;
        a.block(i + bs, i + bs, rest, rest) -= lr * arj.transpose();
    }
    return logp;
}

std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > c) break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

CdfResult quasi_mc_cdf(const Vector& upper, const Matrix& cov, int n_points, int n_rand, std::uint64_t seed) {
    const Ordered o = order_variables(upper, cov);
    const Index m = upper.size();
    const Matrix& l = o.chol;
    const Vector& b = o.upper;
    const Index dims = std::max<Index>(m - 1, 1);
    const std::vector<int> primes = first_primes(static_cast<int>(dims));
    Vector gen(dims);
    for (Index i = 0; i < dims; ++i) {
        const double sq = std::sqrt(static_cast<double>(primes[static_cast<std::size_t>(i)]));
        gen(i) = sq - std::floor(sq);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> estimates;
    Vector y(m), w(dims), shift(dims);
    auto integrand = [&](const Vector& u) {
        double f = 1.0;
        for (Index i = 0; i < m; ++i) {
            const double mu = l.row(i).head(i).dot(y.head(i));
            const double bh = (b(i) == kInf) ? kInf : (b(i) - mu) / l(i, i);
            const double e = (bh == kInf) ? 1.0 : norm_cdf(bh);
            f *= e;
            if (f <= 0.0) return 0.0;
            if (i + 1 < m) {
                const double q = std::clamp(u(i) * e, 1e-300, 1.0 - 1e-16);
                y(i) = norm_quantile(q);
            }
        }
        return f;
    };
    for (int r = 0; r < n_rand; ++r) {
        for (Index i = 0; i < dims; ++i) shift(i) = unif(rng);
        double acc = 0.0;
        for (int kpt = 1; kpt <= n_points; ++kpt) {
            for (Index i = 0; i < dims; ++i) {
                double x = kpt * gen(i) + shift(i);
                x -= std::floor(x);
                w(i) = std::abs(2.0 * x - 1.0);  // baker's transform
            }
            acc += integrand(w);
            acc += integrand((Vector::Ones(dims) - w).eval());
        }
        estimates.push_back(acc / (2.0 * n_points));
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / n_rand;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= std::max(1, n_rand - 1) * static_cast<double>(n_rand);
    CdfResult res;
    res.probability = std::clamp(mean, 0.0, 1.0);
    res.log_probability = std::log(res.probability);
    res.error_estimate = std::sqrt(var);
    res.method_used = CdfMethod::quasi_mc;
    return res;
}

// Phi_3 by Gauss-Legendre quadrature over the pivot coordinate of the exact
// bivariate conditional. Returns a negative value when the problem is too
// degenerate or too deep in the tail for this route.
double trivariate_cdf(const Vector& upper, const Matrix& cov, double refine) {
    Vector sd = cov.diagonal().array().sqrt();
    Vector h = upper.cwiseQuotient(sd);
    Matrix r = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
    // pivot with the mildest conditional correlation
    Index pivot = -1;
    double best = kInf;
    for (Index i = 0; i < 3; ++i) {
        const Index j = (i + 1) % 3, k = (i + 2) % 3;
        const double vj = 1.0 - r(i, j) * r(i, j), vk = 1.0 - r(i, k) * r(i, k);
        if (vj < 1e-6 || vk < 1e-6) continue;
        const double rc = std::abs((r(j, k) - r(i, j) * r(i, k)) / std::sqrt(vj * vk));
        if (rc < best) best = rc, pivot = i;
    }
    if (pivot < 0 || best > 1.0 - 1e-8) return -1.0;
    const Index j = (pivot + 1) % 3, k = (pivot + 2) % 3;
    const double sj = std::sqrt(1.0 - r(pivot, j) * r(pivot, j)), sk = std::sqrt(1.0 - r(pivot, k) * r(pivot, k));
    const double rc = (r(j, k) - r(pivot, j) * r(pivot, k)) / (sj * sk);
    const double lo = -10.0, hi = std::min(h(pivot), 10.0);
    if (hi <= lo) return -1.0;
    auto f = [&](double z) {
        const double pj = h(j) == kInf ? kInf : (h(j) - r(pivot, j) * z) / sj;
        const double pk = h(k) == kInf ? kInf : (h(k) - r(pivot, k) * z) / sk;
        const double b = (pj == kInf && pk == kInf) ? 1.0
                         : pj == kInf             ? norm_cdf(pk)
                         : pk == kInf             ? norm_cdf(pj)
                                                  : bvn_cdf(pj, pk, rc);
        return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi) * b;
    };
    // panels finer than the narrowest conditional transition
    const double width = std::min({sj, sk, 1.0});
    const int panels = static_cast<int>(std::clamp(std::ceil(refine * (hi - lo) / width), 8.0, 2000.0));
    const double step = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * step;
        for (int q = 0; q < 10; ++q) {
            const double x = kGlX[2][q];
            total += kGlW[2][q] * (f(mid + 0.5 * step * x) + f(mid - 0.5 * step * x));
        }
    }
    return 0.5 * step * total;
}

void check_request(const CdfRequest& req) {
    if (req.cov.rows() != req.cov.cols() || req.cov.rows() != req.upper.size())
        throw InputError("mvn_cdf: upper limits and covariance sizes differ");
    if (req.upper.hasNaN() || req.cov.hasNaN()) throw NumericError("mvn_cdf: NaN in request");
    for (Index i = 0; i < req.cov.rows(); ++i)
        if (!(req.cov(i, i) > 0.0)) throw NumericError("mvn_cdf: covariance has a non-positive diagonal");
}

}  // namespace

double bvn_cdf(double h, double k, double r) { return bvn_upper(-h, -k, r); }

CdfResult mvn_cdf(const CdfRequest& req) {
    check_request(req);
    const Index m = req.upper.size();
    CdfResult res;
    if (m == 0) return res;
    CdfMethod method = req.method;
    if (method == CdfMethod::automatic) {
        if (m <= 2)
            method = CdfMethod::closed_form_1d_2d;
        else if (m == 3)
            method = CdfMethod::trivariate_quadrature;
        else if (m <= 100)
            method = CdfMethod::bivariate_conditioning;
        else
            throw InputError("mvn_cdf: dimension " + std::to_string(m) +
                             " exceeds 100; partition the problem and use block_lower_bound");
    }
    if (m >= 2) robust_cholesky(req.cov, -1.0, "mvn_cdf covariance");
    res.method_used = method;
    switch (method) {
        case CdfMethod::closed_form_1d_2d: {
            if (m > 2) throw InputError("mvn_cdf: closed form only for m <= 2");
            if (m == 1) {
                const double z = req.upper(0) / std::sqrt(req.cov(0, 0));
                res.log_probability = norm_logcdf(z);
                res.probability = std::exp(res.log_probability);
            } else {
                const double s1 = std::sqrt(req.cov(0, 0)), s2 = std::sqrt(req.cov(1, 1));
                const double r = std::clamp(req.cov(0, 1) / (s1 * s2), -1.0, 1.0);
                const double h = req.upper(0) / s1, k = req.upper(1) / s2;
                res.probability = bvn_cdf(h, k, r);
                if (res.probability > 1e-200) {
                    res.log_probability = std::log(res.probability);
                } else {
                    // deep tail: conditioning approximation keeps the log finite
                    Vector u(2);
                    u << h, k;
                    Matrix c(2, 2);
                    c << 1.0, r, r, 1.0;
                    res.log_probability = conditioning_log_prob(u, c, 2);
                }
            }
            return res;
        }
        case CdfMethod::bivariate_conditioning:
        case CdfMethod::univariate_conditioning: {
            const double bvc = conditioning_log_prob(req.upper, req.cov, 2);
            const double uvc = conditioning_log_prob(req.upper, req.cov, 1);
            res.log_probability = (method == CdfMethod::bivariate_conditioning) ? bvc : uvc;
            res.probability = std::exp(res.log_probability);
            if (req.check_points > 0) {
                const CdfResult q = quasi_mc_cdf(req.upper, req.cov, req.check_points, 8, req.seed);
                res.error_estimate = std::abs(res.probability - q.probability) + 3.0 * q.error_estimate;
            } else {
                res.error_estimate = std::abs(std::exp(bvc) - std::exp(uvc));
            }
            return res;
        }
        case CdfMethod::trivariate_quadrature: {
            if (m != 3) throw InputError("mvn_cdf: trivariate quadrature needs m == 3");
            const double p = trivariate_cdf(req.upper, req.cov, 2.0);
            if (p > 1e-200) {
                const double coarse = trivariate_cdf(req.upper, req.cov, 1.0);
                res.probability = std::min(p, 1.0);
                res.log_probability = std::log(res.probability);
                res.error_estimate = std::abs(p - coarse) + 1e-14;
                return res;
            }
            // degenerate or deep tail: conditioning keeps the log finite
            res.method_used = CdfMethod::bivariate_conditioning;
            res.log_probability = conditioning_log_prob(req.upper, req.cov, 2);
            res.probability = std::exp(res.log_probability);
            res.error_estimate = res.probability;
            return res;
        }
        case CdfMethod::quasi_mc:
            if (m == 1) {
                CdfRequest r1 = req;
                r1.method = CdfMethod::closed_form_1d_2d;
                CdfResult out = mvn_cdf(r1);
                out.method_used = CdfMethod::quasi_mc;
                return out;
            }
            return quasi_mc_cdf(req.upper, req.cov, std::max(1, req.mc_samples), std::max(2, req.randomizations),
                                req.seed);
        case CdfMethod::automatic:
            break;
    }
    throw InputError("mvn_cdf: unknown method");
}

CdfResult mvn_cdf(const Vector& upper, const Matrix& cov, CdfMethod method) {
    CdfRequest req;
    req.upper = upper;
    req.cov = cov;
    req.method = method;
    req.check_points = 0;
    return mvn_cdf(req);
}

void Partition::validate(Index m) const {
    std::vector<int> seen(static_cast<std::size_t>(m), 0);
    for (const auto& blk : blocks) {
        if (blk.empty()) throw InputError("partition: empty block");
        for (Index i : blk) {
            if (i < 0 || i >= m) throw InputError("partition: index out of range");
            if (seen[static_cast<std::size_t>(i)]++) throw InputError("partition: blocks overlap");
        }
    }
    for (int c : seen)
        if (c == 0) throw InputError("partition: blocks do not cover every index");
}

Partition Partition::random_balanced(Index m, Index block_size, std::uint64_t seed) {
    if (block_size < 1) throw InputError("partition: block size must be >= 1");
    Partition p;
    p.block_size_target = block_size;
    if (m == 0) return p;
    std::vector<Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const Index nb = (m + block_size - 1) / block_size;
    p.blocks.assign(static_cast<std::size_t>(nb), {});
    for (Index i = 0; i < m; ++i) p.blocks[static_cast<std::size_t>(i % nb)].push_back(idx[static_cast<std::size_t>(i)]);
    for (auto& b : p.blocks) std::sort(b.begin(), b.end());
    return p;
}

Partition Partition::single(Index m) {
    Partition p;
    p.block_size_target = std::max<Index>(m, 1);
    std::vector<Index> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), Index{0});
    if (m > 0) p.blocks.push_back(std::move(all));
    return p;
}

double block_lower_bound(const Vector& upper, const Matrix& cov, const Partition& partition, CdfMethod method) {
    partition.validate(upper.size());
    double total = 0.0;
    for (const auto& blk : partition.blocks)
        total += mvn_cdf(select(upper, blk), select_block(cov, blk, blk), method).probability;
    return total - static_cast<double>(partition.blocks.size() - 1);
}

double block_log_product(const Vector& upper, const Matrix& cov, const Partition& partition, CdfMethod method) {
    partition.validate(upper.size());
    double total = 0.0;
    for (const auto& blk : partition.blocks)
        total += mvn_cdf(select(upper, blk), select_block(cov, blk, blk), method).log_probability;
    return total;
}

double grad_log_mvn_cdf(const Vector& upper, const Matrix& cov, const Matrix& dcov, const Matrix& trunc_draws) {
    const Index m = upper.size();
    if (cov.rows() != m || dcov.rows() != m || dcov.cols() != m || trunc_draws.cols() != m)
        throw InputError("grad_log_mvn_cdf: dimension mismatch");
    const Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("grad_log_mvn_cdf: covariance is singular");
    const Matrix a = llt.solve(dcov);  // cov^-1 dcov
    const Matrix n = trunc_second_moment(trunc_draws);
    return -0.5 * a.trace() + 0.5 * (a * llt.solve(n)).trace();
}

}  // namespace skewgp
