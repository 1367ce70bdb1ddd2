#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "skewgp/likelihoods.hpp"

#include <random>

using namespace skewgp;

namespace {

Matrix grid(Index n) { return Vector::LinSpaced(n, 0.0, 1.0); }

}  // namespace

TEST_CASE("numeric rows") {
    const Matrix x = grid(4);
    const ObservationSet a = numeric_block(x, std::vector<Index>{0}, Vector::Constant(1, 2.0), 0.5);
    CHECK(a.numeric.c == Matrix(Vector::Unit(4, 0).transpose()));
    CHECK(a.numeric.r(0, 0) == doctest::Approx(0.25));
    LinearObservation sum;
    sum.c = Vector::Zero(4);
    sum.c(0) = sum.c(1) = 1.0;
    sum.y = 1.0;
    const ObservationSet b = numeric_block(x, {sum}, 0.0);
    CHECK(b.numeric.c.row(0).sum() == 2.0);
    CHECK(b.numeric.r(0, 0) == doctest::Approx(1e-6));
    sum.c = Vector::Zero(3);
    CHECK_THROWS_AS(numeric_block(x, {sum}, 1.0), InputError);
}

TEST_CASE("classification rows") {
    const Matrix x = grid(3);
    Vector all(3);
    all << 1, 1, 1;
    CHECK(classification_block(x, all).probit.w == Matrix::Identity(3, 3));
    Vector zo(3);
    zo << 0, 1, 0;
    const ObservationSet c = classification_block(x, zo);
    CHECK(c.probit.w.diagonal() == Vector((Vector(3) << -1, 1, -1).finished()));
    CHECK(c.probit.z.isZero());
    CHECK(c.probit.sigma == Matrix::Identity(3, 3));
    Vector bad(3);
    bad << 0, 2, 1;
    CHECK_THROWS_AS(classification_block(x, bad), InputError);
}

TEST_CASE("preference rows") {
    const Matrix x = grid(3);
    const ObservationSet p = preference_block(x, {{0, 1}}, 1.0);
    CHECK(p.probit.w.row(0) == (Vector(3) << 1, -1, 0).finished().transpose());
    const ObservationSet q = preference_block(x, {{1, 0}}, 1.0);
    CHECK(q.probit.w == -p.probit.w);
    CHECK(preference_block(x, {{0, 1}}, 2.0).probit.w == 0.5 * p.probit.w);
    CHECK_THROWS_AS(preference_block(x, {{1, 1}}, 1.0), InputError);
}

TEST_CASE("ordinal rows") {
    const Matrix x = grid(1);
    OrdinalSpec spec;
    spec.thresholds = Vector::Zero(1);
    const ObservationSet low = ordinal_block(x, {0}, {1}, spec);
    CHECK(low.probit.size() == 1);
    CHECK(low.probit.z(0) == 0.0);
    CHECK(low.probit.w(0, 0) == -1.0);
    // r = 2 with b = 0 is classification with label 2 -> +1
    const ObservationSet high = ordinal_block(x, {0}, {2}, spec);
    CHECK(high.probit.w == classification_block(x, Vector::Ones(1)).probit.w);

    spec.thresholds = (Vector(3) << -1.0, 0.5, 1.2).finished();
    spec.noise = 0.7;
    const ObservationSet mid = ordinal_block(x, {0}, {3}, spec);
    CHECK(mid.probit.size() == 2);
    for (double f : {-2.0, 0.0, 2.0}) {
        const double ref = oracle::Phi((1.2 - f) / 0.7) - oracle::Phi((0.5 - f) / 0.7);
        const double got = std::exp(log_likelihood(mid, Vector::Constant(1, f)));
        CHECK(std::abs(got - ref) < 1e-3);
    }
    spec.thresholds = (Vector(2) << 1.0, 0.5).finished();
    CHECK_THROWS_AS(ordinal_block(x, {0}, {1}, spec), InputError);
}

TEST_CASE("valid and invalid outcomes") {
    const Matrix x = grid(3);
    const ObservationSet all = valid_invalid_block(x, {{0, true, 1.0}, {1, true, 2.0}, {2, true, 0.5}}, 0.0, 0.5);
    CHECK(all.numeric.size() == 3);
    CHECK(all.probit.size() == 3);
    const ObservationSet inv = valid_invalid_block(x, {{1, false, std::nullopt}}, 0.0, 1.0);
    for (double f : {-1.0, 0.3}) {
        Vector fv = Vector::Zero(3);
        fv(1) = f;
        CHECK(std::exp(log_likelihood(inv, fv)) == doctest::Approx(oracle::Phi(-f)));
    }
    CHECK_THROWS_AS(valid_invalid_block(x, {{1, false, 1.0}}, 0.0, 1.0), InputError);
    CHECK_THROWS_AS(valid_invalid_block(x, {{1, true, std::nullopt}}, 0.0, 1.0), InputError);
}

TEST_CASE("canonical form is lossless") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    const Index n = 5;
    const Matrix x = grid(n);
    Dataset data;
    data.inputs = x;
    data.ordinal_thresholds = (Vector(2) << -0.5, 0.6).finished();
    data.valid_threshold = 0.2;
    data.observations = {NumObs{{0}, {}, 0.4},          NumObs{{1, 2}, {1.0, -0.5}, 0.1},
                         ClassObs{3, 0},                ClassObs{4, 1},
                         PrefObs{0, 2},                 PrefObs{4, 1},
                         OrdinalObs{2, 1},              OrdinalObs{3, 3},
                         ValidObs{1, true, 0.8},        ValidObs{4, false, std::nullopt}};
    const double sd = 0.6;
    const ObservationSet obs = assemble(data, sd);
    obs.validate();
    for (int t = 0; t < 10; ++t) {
        Vector f(n);
        for (Index i = 0; i < n; ++i) f(i) = nd(rng);
        auto npdf = [&](double r) { return oracle::phi(r / sd) / sd; };
        double raw = npdf(0.4 - f(0)) * npdf(0.1 - (f(1) - 0.5 * f(2)));
        raw *= oracle::Phi(-f(3)) * oracle::Phi(f(4));
        raw *= oracle::Phi((f(0) - f(2)) / sd) * oracle::Phi((f(4) - f(1)) / sd);
        raw *= oracle::Phi((-0.5 - f(2)) / sd) * (1.0 - oracle::Phi((0.6 - f(3)) / sd));
        raw *= npdf(0.8 - f(1)) * oracle::Phi((f(1) - 0.2) / sd) * oracle::Phi((0.2 - f(4)) / sd);
        CHECK(std::exp(log_likelihood(obs, f)) == doctest::Approx(raw).epsilon(1e-6));
    }
}

TEST_CASE("merge") {
    const Matrix x = grid(3);
    const ObservationSet a = numeric_block(x, std::vector<Index>{0, 2}, Vector::Ones(2), 0.3);
    const ObservationSet b = preference_block(x, {{0, 1}, {2, 1}}, 1.0);
    const ObservationSet m = merge(a, b);
    CHECK(m.numeric.size() == 2);
    CHECK(m.probit.size() == 2);
    const ObservationSet same = merge(m, ObservationSet::none(x));
    CHECK(same.numeric.c == m.numeric.c);
    CHECK(same.probit.w == m.probit.w);
    CHECK_THROWS_AS(merge(a, preference_block(grid(4), {{0, 1}}, 1.0)), InputError);
    Dataset empty;
    empty.inputs = x;
    CHECK_THROWS_AS(assemble(empty, 1.0), InputError);
}
