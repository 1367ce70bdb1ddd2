#pragma once

#include "skewgp/acquisition.hpp"
#include "skewgp/benchmarks.hpp"
#include "skewgp/model_selection.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skewgp {

enum class Task { fit, predict, active_learn, pbo, mixed_bo, safe_bo, sample_bench, generate };

Task parse_task(const std::string& name);
std::string to_string(Task task);

struct ExperimentConfig {
    Task task = Task::pbo;
    std::string benchmark = "one_d";
    int budget = 40;  // pbo: total duels; mixed_bo: iterations after the initial data; others: steps
    int trials = 20;
    std::uint64_t seed = 0;
    std::string output_path;

    AcqConfig acquisition;
    // Model: kernel hyperparameters at the start of every trial. A missing
    // lengthscale defaults to 0.2 of the domain width in each dimension.
    std::optional<KernelSpec> kernel;
    bool refit = true;  // re-optimize hyperparameters every iteration
    int refit_every = 1;
    FitConfig fit;
    Index n_samples = 3000;

    // pbo / mixed_bo
    int initial_duels = 5;
    int initial_numeric = 5;
    int numeric_every = 4;
    double duel_noise = 0.0;  // sd of probit noise on simulated duels, 0 = noiseless
    Index candidates = 201;   // grid size in 1D, random candidates otherwise

    // safe_bo
    double safe_lower = -5.0, safe_upper = 5.0;
    Index safe_grid = 201;
    double safe_variance = 2.0, safe_lengthscale = 1.5;
    double safe_true_lengthscale_lo = 1.0, safe_true_lengthscale_hi = 2.0;
    double safe_noise_variance = 1e-3;

    // active_learn
    std::string dataset_path;  // CSV, label in the last column; empty = synthetic
    int initial_pool = 10;
    Index pool_size = 150;
    Index test_size = 100;

    // sample_bench
    std::vector<Index> sizes = {500, 1000, 2000};
    Index bench_samples = 3100;
    int bench_burn_in = 100;
    int bench_repeats = 3;  // sample_seconds is the fastest of these runs

    // generate
    std::string generate_kind = "preference_1d";
    Index generate_n = 1000;

    void validate() const;
};

/// Parses a JSON config; unknown keys are rejected. Throws InputError.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// A CSV result table; one row per (trial, iteration).
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    /// Column values as numbers (NaN for non-numeric cells).
    std::vector<double> column(const std::string& name) const;
    /// "# skewgp <version> task=... config_hash=..." then a header row.
    std::string to_csv(const ExperimentConfig& config) const;
};

std::string format_number(double v);

/// One row per (trial, step): test accuracy and fraction of unique acquisitions.
ResultTable run_active_learning(const ExperimentConfig& config);
/// One row per (trial, iteration) with the true value at the incumbent x_r,
/// the input with the highest posterior mean among those queried so far.
ResultTable run_pbo(const ExperimentConfig& config);
/// As run_pbo; every numeric_every-th iteration queries g directly.
ResultTable run_mixed_bo(const ExperimentConfig& config);
/// One row per (trial, iteration) with cumulative constraint violations.
ResultTable run_safe_bo(const ExperimentConfig& config);
/// Timing per n of latent draws at the training inputs of a synthetic
/// classification problem. Gelman-Rubin columns compare a second chain
/// (max and median over the n coordinates).
ResultTable run_sample_bench(const ExperimentConfig& config);

/// Least-squares slope of log(time) on log(n).
double power_law_exponent(const std::vector<double>& n, const std::vector<double>& time);

struct SyntheticParams {
    Index n = 1000;
    Index dim = 3;
};

/// Kinds:
///   preference_1d   25 points on [-2.6, 2.6], 45 random duels of cos(5x) + exp(-x^2/2)
///   mixed_1d        20 numeric points of the mixed test function on [0, 2.5) and
///                   30 duels on [2.5, 5] against one reference point
///   classification  x ~ N(0, I_d), f ~ GP(0, RBF) with l_j ~ U(0.1, 1.1), sigma^2 ~ U(1, 10),
///                   y ~ Bernoulli(Phi(f))
///   separable_2d    points on [-3, 3]^2 labelled by the sign of x1 + 0.5 x2
Dataset generate_synthetic(const std::string& kind, const SyntheticParams& params, std::uint64_t seed);

/// The function behind mixed_1d: sin(3x) + x/4.
double mixed_test_function(double x);

/// Reads a numeric CSV (optional header) whose last column is the class;
/// the smallest class value (class 0 in the usual encodings) becomes +1 and
/// every other class -1 (one-vs-rest).
Dataset load_classification_csv(const std::string& path);

}  // namespace skewgp
