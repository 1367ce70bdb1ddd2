#include "skewgp/benchmarks.hpp"

#include <cmath>

namespace skewgp {

namespace {

BenchmarkFunction make(std::string name, Vector lower, Vector upper, std::function<double(const Vector&)> f,
                       double optimum, Vector argmax) {
    BenchmarkFunction b;
    b.name = std::move(name);
    b.dim = lower.size();
    b.lower = std::move(lower);
    b.upper = std::move(upper);
    b.eval = std::move(f);
    b.optimum = optimum;
    b.argmax = std::move(argmax);
    return b;
}

double colville(const Vector& x) {
    const double a = x(0), b = x(1), c = x(2), d = x(3);
    return 100 * std::pow(a * a - b, 2) + std::pow(a - 1, 2) + std::pow(c - 1, 2) + 90 * std::pow(c * c - d, 2) +
           10.1 * (std::pow(b - 1, 2) + std::pow(d - 1, 2)) + 19.8 * (b - 1) * (d - 1);
}

double hartman6(const Vector& x) {
    static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
    static const double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                   {0.05, 10, 17, 0.1, 8, 14},
                                   {3, 3.5, 1.7, 10, 17, 8},
                                   {17, 8, 0.05, 10, 0.1, 14}};
    static const double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                   {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                   {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                   {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = 0.0;
        for (int j = 0; j < 6; ++j) e += a[i][j] * std::pow(x(j) - p[i][j], 2);
        s += alpha[i] * std::exp(-e);
    }
    return -s;
}

double langermann(const Vector& x) {
    static const double c[5] = {1, 2, 5, 2, 3};
    static const double a[5][2] = {{3, 5}, {5, 2}, {2, 1}, {1, 4}, {7, 9}};
    double s = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double r = std::pow(x(0) - a[i][0], 2) + std::pow(x(1) - a[i][1], 2);
        s += c[i] * std::exp(-r / kPi) * std::cos(kPi * r);
    }
    return s;
}

}  // namespace

std::vector<std::string> benchmark_names() {
    return {"one_d", "six_hump_camel", "langermann", "colville", "rosenbrock5", "hartman6"};
}

BenchmarkFunction benchmark(const std::string& name) {
    if (name == "one_d" || name == "1d") {
        return make(
            "one_d", Vector::Constant(1, -2.6), Vector::Constant(1, 2.6),
            [](const Vector& x) { return std::cos(5 * x(0)) + std::exp(-0.5 * x(0) * x(0)); }, 2.0, Vector::Zero(1));
    }
    if (name == "six_hump_camel") {
        return make(
            "six_hump_camel", (Vector(2) << -3, -2).finished(), (Vector(2) << 3, 2).finished(),
            [](const Vector& x) {
                const double a = x(0), b = x(1);
                return -((4 - 2.1 * a * a + std::pow(a, 4) / 3) * a * a + a * b + (-4 + 4 * b * b) * b * b);
            },
            1.031628453489877, (Vector(2) << 0.0898420131003, -0.7126564030207).finished());
    }
    if (name == "langermann") {
        // optimum located by a dense grid plus coordinate refinement; see README
        return make("langermann", Vector::Zero(2), Vector::Constant(2, 10.0),
                    [](const Vector& x) { return -langermann(x); }, 4.155809291847793,
                    (Vector(2) << 2.7934022107, 1.5972325025).finished());
    }
    if (name == "colville") {
        return make("colville", Vector::Constant(4, -10), Vector::Constant(4, 10),
                    [](const Vector& x) { return -colville(x); }, 0.0, Vector::Ones(4));
    }
    if (name == "rosenbrock5") {
        return make(
            "rosenbrock5", Vector::Constant(5, -5), Vector::Constant(5, 10),
            [](const Vector& x) {
                double s = 0.0;
                for (int i = 0; i < 4; ++i) s += 100 * std::pow(x(i + 1) - x(i) * x(i), 2) + std::pow(x(i) - 1, 2);
                return -s;
            },
            0.0, Vector::Ones(5));
    }
    if (name == "hartman6") {
        return make("hartman6", Vector::Zero(6), Vector::Ones(6), [](const Vector& x) { return -hartman6(x); },
                    3.322368011415515,
                    (Vector(6) << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573).finished());
    }
    throw InputError("unknown benchmark '" + name + "'");
}

}  // namespace skewgp
