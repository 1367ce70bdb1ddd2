#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "skewgp/mvn_cdf.hpp"
#include "skewgp/trunc_sampler.hpp"

#include <random>

using namespace skewgp;

TEST_CASE("scalar and bivariate closed forms") {
    CHECK(mvn_cdf(Vector::Zero(1), Matrix::Identity(1, 1)).probability == doctest::Approx(0.5).epsilon(1e-15));
    Matrix c(2, 2);
    c << 1.0, 0.5, 0.5, 1.0;
    const double orthant = 0.25 + std::asin(0.5) / (2.0 * kPi);
    CHECK(mvn_cdf(Vector::Zero(2), c).probability == doctest::Approx(orthant).epsilon(1e-12));
    CHECK(orthant == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // bvn_cdf against 1D quadrature of the conditional
    for (double r : {-0.95, -0.6, -0.1, 0.2, 0.5, 0.8, 0.97}) {
        for (double h : {-2.0, -0.3, 0.7, 1.5}) {
            const double k = 0.4 - 0.5 * h;
            const double sr = std::sqrt(1 - r * r);
            const double ref = oracle::integrate(
                [&](double x) { return oracle::phi(x) * oracle::Phi((k - r * x) / sr); }, -12.0, h, 600);
            CHECK(bvn_cdf(h, k, r) == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("diagonal covariance factorizes") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5), v(0.3, 3.0);
    for (int m : {1, 2, 3, 5, 8}) {
        Vector up(m), d(m);
        double prod = 1.0;
        for (int i = 0; i < m; ++i) {
            up(i) = u(rng);
            d(i) = v(rng);
            prod *= oracle::Phi(up(i) / std::sqrt(d(i)));
        }
        const Matrix cov = d.asDiagonal();
        CHECK(mvn_cdf(up, cov).probability == doctest::Approx(prod).epsilon(1e-10));
        CHECK(mvn_cdf(up, cov, CdfMethod::quasi_mc).probability == doctest::Approx(prod).epsilon(1e-6));
    }
}

TEST_CASE("bivariate conditioning and quasi-MC agree with Monte Carlo") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 3 + trial % 8;
        const Matrix cov = oracle::to_correlation(oracle::random_spd(rng, m));
        Vector up(m);
        for (int i = 0; i < m; ++i) up(i) = 0.5 + 0.7 * nd(rng);
        CdfRequest req;
        req.upper = up;
        req.cov = cov;
        req.method = CdfMethod::bivariate_conditioning;
        const CdfResult bvc = mvn_cdf(req);
        req.method = CdfMethod::quasi_mc;
        req.seed = 777;
        const CdfResult qmc = mvn_cdf(req);
        const oracle::Estimate mc = oracle::mc_orthant(rng, up, cov, 400000);
        CHECK(std::abs(qmc.probability - mc.value) < 3.0 * std::hypot(mc.se, qmc.error_estimate) + 1e-12);
        CHECK(std::abs(bvc.probability - qmc.probability) <=
              3.0 * (bvc.error_estimate + qmc.error_estimate) + 1e-9);
        CHECK(std::abs(bvc.probability - mc.value) < 0.1 * mc.value + 3 * mc.se);
    }
}

TEST_CASE("bivariate conditioning is deterministic") {
    std::mt19937_64 rng(5);
    const Matrix cov = oracle::random_spd(rng, 6);
    const Vector up = Vector::LinSpaced(6, -0.5, 1.0);
    CHECK(mvn_cdf(up, cov).probability == mvn_cdf(up, cov).probability);
}

TEST_CASE("monotone in each upper limit") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 5;
        const Matrix cov = oracle::random_spd(rng, m);
        Vector up = Vector::LinSpaced(m, -1.0, 1.0);
        const double base = mvn_cdf(up, cov).probability;
        for (int i = 0; i < m; ++i) {
            Vector up2 = up;
            up2(i) += 0.3;
            CHECK(mvn_cdf(up2, cov).probability >= base - 1e-12);
        }
    }
}

TEST_CASE("scale invariance of the orthant probability") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const Matrix cov = oracle::random_spd(rng, 2);
        const Vector up = Vector::LinSpaced(2, -0.4, 0.9);
        Vector v(2);
        v << 0.3 + t * 0.2, 2.5 - t * 0.1;
        const Matrix scaled = v.asDiagonal().inverse() * cov * v.asDiagonal().inverse();
        CHECK(mvn_cdf(v.cwiseInverse().cwiseProduct(up), scaled).probability ==
              doctest::Approx(mvn_cdf(up, cov).probability).epsilon(1e-6));
    }
}

TEST_CASE("errors") {
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(mvn_cdf(Vector::Zero(2), bad), NumericError);
    CHECK_THROWS_AS(mvn_cdf(Vector::Zero(3), Matrix::Identity(2, 2)), InputError);
    CHECK_THROWS_AS(mvn_cdf(Vector::Zero(101), Matrix::Identity(101, 101)), InputError);
    CHECK(mvn_cdf(Vector(0), Matrix(0, 0)).probability == 1.0);
}

TEST_CASE("partition and block lower bound") {
    Partition p = Partition::random_balanced(10, 4, 9);
    CHECK(p.blocks.size() == 3);
    p.validate(10);
    Partition bad;
    bad.blocks = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(bad.validate(3), InputError);
    bad.blocks = {{0, 1}};
    CHECK_THROWS_AS(bad.validate(3), InputError);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 2.0), v(0.2, 2.0);
    for (int t = 0; t < 100; ++t) {
        const int m = 6;
        Vector up(m), d(m);
        for (int i = 0; i < m; ++i) {
            up(i) = u(rng);
            d(i) = v(rng);
        }
        const Matrix cov = d.asDiagonal();
        const Partition part = Partition::random_balanced(m, 1 + t % 4, t);
        CHECK(block_lower_bound(up, cov, part) <= mvn_cdf(up, cov).probability + 1e-12);
    }
    const Matrix cov = oracle::random_spd(rng, 7);
    const Vector up = Vector::Constant(7, 0.8);
    CHECK(block_lower_bound(up, cov, Partition::single(7)) == mvn_cdf(up, cov).probability);
    CHECK(block_log_product(up, cov, Partition::single(7)) == mvn_cdf(up, cov).log_probability);
}

TEST_CASE("log-CDF gradient") {
    Matrix draws(1, 2);
    draws << 0.3, -0.2;
    CHECK(grad_log_mvn_cdf(Vector::Zero(2), Matrix::Identity(2, 2), Matrix::Zero(2, 2), draws) == 0.0);

    // m=1, upper=0: log Phi(0 / sigma) does not depend on the scale.
    TruncSpec one;
    one.gamma = Vector::Zero(1);
    one.gamma_mat = Matrix::Identity(1, 1);
    one.seed = 4;
    const Matrix d1 = liness_sample(one, 100000);
    CHECK(std::abs(grad_log_mvn_cdf(Vector::Zero(1), Matrix::Identity(1, 1), Matrix::Identity(1, 1), d1)) < 0.02);

    // m=2 against central differences of the closed form.
    Matrix cov(2, 2);
    cov << 1.2, 0.4, 0.4, 0.8;
    Matrix dcov(2, 2);
    dcov << 0.5, 0.2, 0.2, -0.3;
    Vector up(2);
    up << -1.0, -0.6;
    const double h = 1e-4;
    const double fd = (mvn_cdf(up, cov + h * dcov).log_probability - mvn_cdf(up, cov - h * dcov).log_probability) /
                      (2.0 * h);
    TruncSpec spec;
    spec.gamma = up;  // draws of -X with X <= up share the second moment
    spec.gamma_mat = cov;
    spec.seed = 8;
    spec.thin = 10;
    const Matrix draws2 = liness_sample(spec, 100000);
    const double g = grad_log_mvn_cdf(up, cov, dcov, draws2);
    CHECK(std::abs(g - fd) < 1e-2 * std::abs(fd));
}

TEST_CASE("trivariate quadrature") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 6; ++t) {
        const Matrix c = oracle::random_spd(rng, 3, t % 2 ? 0.05 : 0.4);
        Vector a(3);
        for (int i = 0; i < 3; ++i) a(i) = nd(rng);
        const CdfResult r = mvn_cdf(a, c);
        CHECK(r.method_used == CdfMethod::trivariate_quadrature);
        CHECK(r.probability == doctest::Approx(oracle::orthant3(a, c)).epsilon(1e-10));
        CHECK(r.error_estimate < 1e-10);
    }
    // an unbounded coordinate reduces to the bivariate closed form
    Matrix c = oracle::to_correlation(oracle::random_spd(rng, 3));
    Vector a(3);
    a << 0.3, std::numeric_limits<double>::infinity(), -0.4;
    const double r02 = c(0, 2);
    CHECK(mvn_cdf(a, c).probability == doctest::Approx(bvn_cdf(0.3, -0.4, r02)).epsilon(1e-12));
    // perfectly correlated pair falls back to conditioning without throwing
    Matrix d = Matrix::Ones(3, 3);
    d(2, 2) = 2.0;
    CHECK_NOTHROW(mvn_cdf(Vector::Constant(3, 0.1), d + 1e-9 * Matrix::Identity(3, 3)));
}
