#pragma once

#include "skewgp/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace skewgp {

/// Test function in maximization form on a box.
struct BenchmarkFunction {
    std::string name;
    Index dim = 1;
    Vector lower, upper;
    std::function<double(const Vector&)> eval;
    double optimum = 0.0;  // maximum over the box
    Vector argmax;

    double operator()(const Vector& x) const { return eval(x); }
};

// Standard minimization forms, negated:
//   one_d          cos(5x) + exp(-x^2/2) on [-2.6, 2.6] (already a maximization), max 2 at 0
//   six_hump_camel (4 - 2.1 x1^2 + x1^4/3) x1^2 + x1 x2 + (-4 + 4 x2^2) x2^2 on [-3,3]x[-2,2]
//   langermann     sum_i c_i exp(-|x-A_i|^2/pi) cos(pi |x-A_i|^2), m = 5, on [0,10]^2
//   colville       4D, on [-10,10]^4, min 0 at (1,1,1,1)
//   rosenbrock5    sum 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2 on [-5,10]^5, min 0 at ones
//   hartman6       the usual 4-term exponential sum on [0,1]^6, min -3.32237
BenchmarkFunction benchmark(const std::string& name);
std::vector<std::string> benchmark_names();

}  // namespace skewgp
