#include "skewgp/experiments.hpp"

#include "skewgp/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace skewgp {

using nlohmann::json;

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string join(const Vector& x) {
    std::string out;
    for (Index i = 0; i < x.size(); ++i) {
        if (i) out += ';';
        out += format_number(x(i));
    }
    return out;
}

Matrix stack(const std::vector<Vector>& rows, Index dim) {
    Matrix m(static_cast<Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Index>(i)) = rows[i].transpose();
    return m;
}

Vector uniform_point(std::mt19937_64& rng, const Vector& lo, const Vector& hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(lo.size());
    for (Index j = 0; j < x.size(); ++j) x(j) = lo(j) + u(rng) * (hi(j) - lo(j));
    return x;
}

// Index of x among the stored points, appending it when new.
Index intern(std::vector<Vector>& points, const Vector& x) {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i] == x) return static_cast<Index>(i);
    points.push_back(x);
    return static_cast<Index>(points.size()) - 1;
}

KernelSpec start_kernel(const ExperimentConfig& cfg, const Vector& lo, const Vector& hi, double noise_variance) {
    if (cfg.kernel) return *cfg.kernel;
    KernelSpec k;
    k.lengthscales = 0.2 * (hi - lo);
    k.variance = 1.0;
    k.noise_variance = noise_variance;
    return k;
}

// Re-optimizes the kernel with the noise coordinate held at its current value.
KernelSpec refit_kernel(const KernelSpec& current, const Dataset& data, const FitConfig& base, std::uint64_t seed) {
    FitConfig fc = base;
    fc.seed = seed;
    fc.final_fit.n_samples = 0;
    fc.final_fit.marginal = MarginalMode::none;
    HyperBounds box = fc.bounds ? *fc.bounds : default_bounds(data, std::log(current.noise_variance));
    const Index p = box.lower.size();
    box.lower(p - 1) = box.upper(p - 1) = std::log(current.noise_variance);
    fc.bounds = box;
    try {
        return optimize(SkewPriorSpec::gaussian(current), data, fc).prior.kernel;
    } catch (const OptimizationError&) {
        return current;
    }
}

FitOptions sampling_options(Index n_samples, std::uint64_t seed) {
    FitOptions o;
    o.n_samples = n_samples;
    o.seed = seed;
    o.marginal = MarginalMode::none;
    return o;
}

Matrix candidate_set(const ExperimentConfig& cfg, const BenchmarkFunction& b, const Vector& incumbent,
                     std::mt19937_64& rng) {
    if (b.dim == 1) {
        const Vector g = Vector::LinSpaced(cfg.candidates, b.lower(0), b.upper(0));
        return g;
    }
    const Index local = cfg.candidates / 4;
    Matrix c(cfg.candidates + local, b.dim);
    for (Index i = 0; i < cfg.candidates; ++i) c.row(i) = uniform_point(rng, b.lower, b.upper).transpose();
    std::normal_distribution<double> nd;
    for (Index i = 0; i < local; ++i)
        for (Index j = 0; j < b.dim; ++j)
            c(cfg.candidates + i, j) =
                std::clamp(incumbent(j) + 0.05 * (b.upper(j) - b.lower(j)) * nd(rng), b.lower(j), b.upper(j));
    return c;
}

// 1 when a beats b in a simulated duel.
bool duel(const BenchmarkFunction& b, const Vector& x, const Vector& y, double noise, std::mt19937_64& rng) {
    const double d = b(x) - b(y);
    if (noise <= 0.0) return d >= 0.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < norm_cdf(d / noise);
}

ResultTable run_bo(const ExperimentConfig& cfg, bool mixed) {
    cfg.validate();
    if (cfg.acquisition.kind != AcqKind::dueling_ucb && cfg.acquisition.kind != AcqKind::eiig)
        throw InputError("preferential BO supports dueling_ucb and eiig");
    const BenchmarkFunction bench = benchmark(cfg.benchmark);
    ResultTable table;
    table.columns = {"trial", "iteration", "query", "n_duels", "n_numeric", "x_r", "g_x_r", "best_g_x_r", "optimum"};
    const int iterations = mixed ? cfg.budget : std::max(0, cfg.budget - cfg.initial_duels);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t tseed = mix(cfg.seed, static_cast<std::uint64_t>(trial));
        std::mt19937_64 rng(tseed);
        std::vector<Vector> points;
        Dataset data;
        int n_duels = 0, n_numeric = 0;
        auto add_duel = [&](const Vector& a, const Vector& b) {
            const Index ia = intern(points, a), ib = intern(points, b);
            const bool a_wins = duel(bench, a, b, cfg.duel_noise, rng);
            data.observations.push_back(a_wins ? PrefObs{ia, ib} : PrefObs{ib, ia});
            ++n_duels;
        };
        auto add_numeric = [&](const Vector& x) {
            data.observations.push_back(NumObs{{intern(points, x)}, {}, bench(x)});
            ++n_numeric;
        };
        for (int k = 0; k < std::min(cfg.initial_duels, cfg.budget); ++k) {
            const Vector a = uniform_point(rng, bench.lower, bench.upper);
            const Vector b = uniform_point(rng, bench.lower, bench.upper);
            add_duel(a, b);
        }
        if (mixed)
            for (int k = 0; k < cfg.initial_numeric; ++k) add_numeric(uniform_point(rng, bench.lower, bench.upper));

        KernelSpec kernel = start_kernel(cfg, bench.lower, bench.upper, mixed ? 0.01 : 1.0);
        double best = -std::numeric_limits<double>::infinity();
        std::string last = "initial";
        for (int it = 0; it <= iterations; ++it) {
            data.inputs = stack(points, bench.dim);
            const std::uint64_t iseed = mix(tseed, static_cast<std::uint64_t>(it) + 1);
            if (cfg.refit && it % cfg.refit_every == 0) kernel = refit_kernel(kernel, data, cfg.fit, iseed);
            const FittedModel model = fit(SkewPriorSpec::gaussian(kernel), assemble(data, std::sqrt(kernel.noise_variance)),
                                          sampling_options(cfg.n_samples, iseed));
            Index r = 0;
            model.posterior_mean(data.inputs).maxCoeff(&r);
            const Vector xr = points[static_cast<std::size_t>(r)];
            const double gr = bench(xr);
            best = std::max(best, gr);
            table.add({std::to_string(trial), std::to_string(it), last, std::to_string(n_duels), std::to_string(n_numeric),
                       join(xr), format_number(gr), format_number(best), format_number(bench.optimum)});
            if (it == iterations) break;

            const Matrix cand = candidate_set(cfg, bench, xr, rng);
            Matrix joint(cand.rows() + 1, bench.dim);
            joint << cand, xr.transpose();
            const Matrix f = model.sample_latent(joint, cfg.n_samples, iseed ^ 0xabcdefULL);
            AcquisitionResult acq = acquire(f.leftCols(cand.rows()), cfg.acquisition, Vector(f.col(cand.rows())));
            for (Index i = 0; i < cand.rows(); ++i)
                if (cand.row(i).transpose() == xr) acq.scores(i) = -std::numeric_limits<double>::infinity();
            acq.scores.maxCoeff(&acq.best);
            const Vector next = cand.row(acq.best).transpose();
            if (mixed && (it + 1) % cfg.numeric_every == 0) {
                add_numeric(next);
                last = "numeric";
            } else {
                add_duel(next, xr);
                last = "duel";
            }
        }
    }
    return table;
}

}  // namespace

// ---------------------------------------------------------------- config

Task parse_task(const std::string& name) {
    static const std::pair<const char*, Task> names[] = {
        {"fit", Task::fit},           {"predict", Task::predict}, {"active_learn", Task::active_learn},
        {"pbo", Task::pbo},           {"mixed_bo", Task::mixed_bo}, {"safe_bo", Task::safe_bo},
        {"sample_bench", Task::sample_bench}, {"generate", Task::generate}};
    for (const auto& [n, t] : names)
        if (name == n) return t;
    throw InputError("unknown task '" + name + "'");
}

std::string to_string(Task task) {
    switch (task) {
        case Task::fit: return "fit";
        case Task::predict: return "predict";
        case Task::active_learn: return "active_learn";
        case Task::pbo: return "pbo";
        case Task::mixed_bo: return "mixed_bo";
        case Task::safe_bo: return "safe_bo";
        case Task::sample_bench: return "sample_bench";
        case Task::generate: return "generate";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (budget < 0) throw InputError("config: budget must be >= 0");
    if (trials < 1) throw InputError("config: trials must be >= 1");
    if (refit_every < 1) throw InputError("config: refit_every must be >= 1");
    if (n_samples < 100) throw InputError("config: n_samples must be >= 100");
    if (candidates < 1) throw InputError("config: candidates must be >= 1");
    if (numeric_every < 1) throw InputError("config: numeric_every must be >= 1");
    if (initial_duels < 0 || initial_numeric < 0 || initial_pool < 1) throw InputError("config: invalid initial sizes");
    if (!(safe_lower < safe_upper) || safe_grid < 2) throw InputError("config: invalid safe-BO domain");
    if (!(safe_noise_variance > 0.0)) throw InputError("config: safe_noise_variance must be positive");
    if (duel_noise < 0.0) throw InputError("config: duel_noise must be >= 0");
    if (bench_repeats < 1 || bench_samples < 2) throw InputError("config: invalid sample_bench settings");
    acquisition.validate();
    fit.validate();
    if (kernel) kernel->validate();
}

namespace {

const char* const kConfigKeys[] = {"task", "benchmark", "budget", "trials", "seed", "output_path", "acquisition",
                                   "credible_level", "eiig_k", "safe_threshold", "safe_prob", "safe_penalty",
                                   "noise", "kernel", "refit", "refit_every", "n_samples", "initial_duels",
                                   "initial_numeric", "numeric_every", "duel_noise", "candidates", "safe_lower",
                                   "safe_upper", "safe_grid", "safe_variance", "safe_lengthscale",
                                   "safe_true_lengthscale", "safe_noise_variance", "dataset_path", "initial_pool",
                                   "pool_size", "test_size", "sizes", "bench_samples", "bench_burn_in", "bench_repeats",
                                   "generate_kind", "generate_n", "fit_config"};

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("config: bad value for '") + key + "'");
    }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) throw InputError("config: expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(std::begin(kConfigKeys), std::end(kConfigKeys), [&](const char* k) { return key == k; }) ==
            std::end(kConfigKeys))
            throw InputError("config: unknown key '" + key + "'");
    }
    ExperimentConfig c;
    if (j.contains("task")) c.task = parse_task(j["task"].get<std::string>());
    read(j, "benchmark", c.benchmark);
    read(j, "budget", c.budget);
    read(j, "trials", c.trials);
    read(j, "seed", c.seed);
    read(j, "output_path", c.output_path);
    if (j.contains("acquisition")) c.acquisition.kind = parse_acq_kind(j["acquisition"].get<std::string>());
    read(j, "credible_level", c.acquisition.credible_level);
    read(j, "eiig_k", c.acquisition.eiig_k);
    read(j, "safe_threshold", c.acquisition.safe_threshold);
    read(j, "safe_prob", c.acquisition.safe_prob);
    read(j, "safe_penalty", c.acquisition.safe_penalty);
    read(j, "noise", c.acquisition.noise);
    if (j.contains("kernel")) c.kernel = kernel_from_json(j["kernel"].dump());
    read(j, "refit", c.refit);
    read(j, "refit_every", c.refit_every);
    read(j, "n_samples", c.n_samples);
    c.acquisition.n_samples = c.n_samples;
    read(j, "initial_duels", c.initial_duels);
    read(j, "initial_numeric", c.initial_numeric);
    read(j, "numeric_every", c.numeric_every);
    read(j, "duel_noise", c.duel_noise);
    read(j, "candidates", c.candidates);
    read(j, "safe_lower", c.safe_lower);
    read(j, "safe_upper", c.safe_upper);
    read(j, "safe_grid", c.safe_grid);
    read(j, "safe_variance", c.safe_variance);
    read(j, "safe_lengthscale", c.safe_lengthscale);
    if (j.contains("safe_true_lengthscale")) {
        std::vector<double> r;
        read(j, "safe_true_lengthscale", r);
        if (r.size() != 2) throw InputError("config: safe_true_lengthscale must be [lo, hi]");
        c.safe_true_lengthscale_lo = r[0];
        c.safe_true_lengthscale_hi = r[1];
    }
    read(j, "safe_noise_variance", c.safe_noise_variance);
    read(j, "dataset_path", c.dataset_path);
    read(j, "initial_pool", c.initial_pool);
    read(j, "pool_size", c.pool_size);
    read(j, "test_size", c.test_size);
    read(j, "sizes", c.sizes);
    read(j, "bench_samples", c.bench_samples);
    read(j, "bench_burn_in", c.bench_burn_in);
    read(j, "bench_repeats", c.bench_repeats);
    read(j, "generate_kind", c.generate_kind);
    read(j, "generate_n", c.generate_n);
    if (j.contains("fit_config")) {
        const json& f = j["fit_config"];
        read(f, "block_size", c.fit.block_size);
        read(f, "restarts", c.fit.restarts);
        read(f, "seed", c.fit.seed);
        read(f, "anneal_steps", c.fit.anneal_steps);
        read(f, "local_iterations", c.fit.local_iterations);
        read(f, "gradient_polish", c.fit.gradient_polish);
        if (f.contains("optimizer")) {
            const std::string o = f["optimizer"].get<std::string>();
            if (o == "annealed_global")
                c.fit.optimizer = Optimizer::annealed_global;
            else if (o == "multistart_local")
                c.fit.optimizer = Optimizer::multistart_local;
            else
                throw InputError("config: unknown optimizer '" + o + "'");
        }
        if (f.contains("objective")) {
            const std::string o = f["objective"].get<std::string>();
            if (o == "lower_bound")
                c.fit.objective = MarginalMode::lower_bound;
            else if (o == "block_product")
                c.fit.objective = MarginalMode::block_product;
            else if (o == "exact")
                c.fit.objective = MarginalMode::exact;
            else
                throw InputError("config: unknown objective '" + o + "'");
        }
        if (f.contains("bounds")) {
            HyperBounds b;
            b.lower = Eigen::Map<const Vector>(f["bounds"].at("lower").get<std::vector<double>>().data(),
                                               static_cast<Index>(f["bounds"].at("lower").size()));
            b.upper = Eigen::Map<const Vector>(f["bounds"].at("upper").get<std::vector<double>>().data(),
                                               static_cast<Index>(f["bounds"].at("upper").size()));
            c.fit.bounds = b;
        }
    }
    c.validate();
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    json j = {{"task", to_string(c.task)},
              {"benchmark", c.benchmark},
              {"budget", c.budget},
              {"trials", c.trials},
              {"seed", c.seed},
              {"acquisition", to_string(c.acquisition.kind)},
              {"credible_level", c.acquisition.credible_level},
              {"eiig_k", c.acquisition.eiig_k},
              {"safe_threshold", c.acquisition.safe_threshold},
              {"safe_prob", c.acquisition.safe_prob},
              {"safe_penalty", c.acquisition.safe_penalty},
              {"noise", c.acquisition.noise},
              {"refit", c.refit},
              {"refit_every", c.refit_every},
              {"n_samples", c.n_samples},
              {"initial_duels", c.initial_duels},
              {"initial_numeric", c.initial_numeric},
              {"numeric_every", c.numeric_every},
              {"duel_noise", c.duel_noise},
              {"candidates", c.candidates},
              {"safe_lower", c.safe_lower},
              {"safe_upper", c.safe_upper},
              {"safe_grid", c.safe_grid},
              {"safe_variance", c.safe_variance},
              {"safe_lengthscale", c.safe_lengthscale},
              {"safe_true_lengthscale", {c.safe_true_lengthscale_lo, c.safe_true_lengthscale_hi}},
              {"safe_noise_variance", c.safe_noise_variance},
              {"dataset_path", c.dataset_path},
              {"initial_pool", c.initial_pool},
              {"pool_size", c.pool_size},
              {"test_size", c.test_size},
              {"sizes", c.sizes},
              {"bench_samples", c.bench_samples},
              {"bench_burn_in", c.bench_burn_in},
              {"bench_repeats", c.bench_repeats},
              {"generate_kind", c.generate_kind},
              {"generate_n", c.generate_n},
              {"fit_config",
               {{"block_size", c.fit.block_size},
                {"restarts", c.fit.restarts},
                {"seed", c.fit.seed},
                {"anneal_steps", c.fit.anneal_steps},
                {"local_iterations", c.fit.local_iterations},
                {"gradient_polish", c.fit.gradient_polish},
                {"optimizer", c.fit.optimizer == Optimizer::annealed_global ? "annealed_global" : "multistart_local"},
                {"objective", c.fit.objective == MarginalMode::block_product ? "block_product"
                              : c.fit.objective == MarginalMode::exact      ? "exact"
                                                                            : "lower_bound"}}}};
    if (c.kernel) j["kernel"] = json::parse(kernel_to_json(*c.kernel));
    if (c.fit.bounds) {
        const auto& b = *c.fit.bounds;
        j["fit_config"]["bounds"] = {{"lower", std::vector<double>(b.lower.data(), b.lower.data() + b.lower.size())},
                                     {"upper", std::vector<double>(b.upper.data(), b.upper.data() + b.upper.size())}};
    }
    return j.dump(2);
}

// ---------------------------------------------------------------- tables

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void ResultTable::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw InputError("ResultTable: row width does not match the columns");
    rows.push_back(std::move(row));
}

std::vector<double> ResultTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InputError("ResultTable: no column '" + name + "'");
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    for (const auto& r : rows) {
        char* end = nullptr;
        const double v = std::strtod(r[k].c_str(), &end);
        out.push_back(end && *end == '\0' && !r[k].empty() ? v : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

std::string ResultTable::to_csv(const ExperimentConfig& config) const {
    std::ostringstream os;
    os << "# skewgp " << library_version() << " task=" << to_string(config.task) << " seed=" << config.seed
       << " config_hash=" << hex(fnv1a(config_to_json(config))) << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
    return os.str();
}

double power_law_exponent(const std::vector<double>& n, const std::vector<double>& time) {
    if (n.size() != time.size() || n.size() < 2) throw InputError("power_law_exponent: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n.size(); ++i) mx += std::log(n[i]), my += std::log(time[i]);
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double dx = std::log(n[i]) - mx;
        sxy += dx * (std::log(time[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------- data

double mixed_test_function(double x) { return std::sin(3.0 * x) + 0.25 * x; }

namespace {

Dataset classification_problem(Index n, Index d, std::mt19937_64& rng, KernelSpec* truth) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ul(0.1, 1.1), uv(1.0, 10.0), u(0.0, 1.0);
    KernelSpec k;
    k.lengthscales.resize(d);
    for (Index j = 0; j < d; ++j) k.lengthscales(j) = ul(rng);
    k.variance = uv(rng);
    Dataset data;
    data.inputs.resize(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) data.inputs(i, j) = nd(rng);
    const Matrix l = psd_factor(kernel_matrix(k, data.inputs, data.inputs) + 1e-8 * k.variance * Matrix::Identity(n, n));
    const Vector f = l * standard_normal(rng, n, 1);
    for (Index i = 0; i < n; ++i) data.observations.push_back(ClassObs{i, u(rng) < norm_cdf(f(i)) ? 1 : -1});
    if (truth) *truth = k;
    return data;
}

}  // namespace

Dataset generate_synthetic(const std::string& kind, const SyntheticParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset data;
    if (kind == "preference_1d") {
        const BenchmarkFunction g = benchmark("one_d");
        data.inputs.resize(25, 1);
        for (Index i = 0; i < 25; ++i) data.inputs(i, 0) = -2.6 + 5.2 * u(rng);
        std::uniform_int_distribution<Index> pick(0, 24);
        for (int k = 0; k < 45; ++k) {
            Index a = pick(rng), b = pick(rng);
            while (b == a) b = pick(rng);
            const bool a_wins = g(data.inputs.row(a).transpose()) >= g(data.inputs.row(b).transpose());
            data.observations.push_back(a_wins ? PrefObs{a, b} : PrefObs{b, a});
        }
        return data;
    }
    if (kind == "mixed_1d") {
        data.inputs.resize(20 + 31, 1);
        for (Index i = 0; i < 20; ++i) data.inputs(i, 0) = 2.5 * (i + u(rng)) / 20.0;
        for (Index i = 0; i < 20; ++i) data.observations.push_back(NumObs{{i}, {}, mixed_test_function(data.inputs(i, 0))});
        const Index ref = 20;
        data.inputs(ref, 0) = 2.5 + 2.5 * u(rng);
        for (Index i = 21; i < 51; ++i) {
            data.inputs(i, 0) = 2.5 + 2.5 * u(rng);
            const bool wins = mixed_test_function(data.inputs(i, 0)) >= mixed_test_function(data.inputs(ref, 0));
            data.observations.push_back(wins ? PrefObs{i, ref} : PrefObs{ref, i});
        }
        return data;
    }
    if (kind == "classification") {
        if (params.n < 1 || params.dim < 1) throw InputError("generate: n and dim must be >= 1");
        return classification_problem(params.n, params.dim, rng, nullptr);
    }
    if (kind == "separable_2d") {
        if (params.n < 1) throw InputError("generate: n must be >= 1");
        data.inputs.resize(params.n, 2);
        for (Index i = 0; i < params.n; ++i) {
            data.inputs(i, 0) = -3 + 6 * u(rng);
            data.inputs(i, 1) = -3 + 6 * u(rng);
            data.observations.push_back(ClassObs{i, data.inputs(i, 0) + 0.5 * data.inputs(i, 1) > 0 ? 1 : -1});
        }
        return data;
    }
    throw InputError("generate: unknown kind '" + kind + "'");
}

Dataset load_classification_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t width = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) numeric = false;
            vals.push_back(v);
        }
        if (!numeric) {
            if (rows.empty() && lineno == 1) continue;  // header
            throw InputError(path + ":" + std::to_string(lineno) + ": non-numeric cell");
        }
        if (width == 0) width = vals.size();
        if (vals.size() != width || width < 2) throw InputError(path + ":" + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw InputError(path + ": no data rows");
    double first = rows[0].back();
    for (const auto& r : rows) first = std::min(first, r.back());
    Dataset data;
    data.inputs.resize(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < width; ++j) data.inputs(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        data.observations.push_back(ClassObs{static_cast<Index>(i), rows[i].back() == first ? 1 : -1});
    }
    return data;
}

// ---------------------------------------------------------------- runs

ResultTable run_pbo(const ExperimentConfig& config) { return run_bo(config, false); }
ResultTable run_mixed_bo(const ExperimentConfig& config) { return run_bo(config, true); }

ResultTable run_safe_bo(const ExperimentConfig& cfg) {
    cfg.validate();
    AcqConfig acq = cfg.acquisition;
    acq.kind = AcqKind::safe_ucb;
    acq.n_samples = cfg.n_samples;
    const double h = acq.safe_threshold;
    const Vector grid = Vector::LinSpaced(cfg.safe_grid, cfg.safe_lower, cfg.safe_upper);
    Index start = 0;
    grid.cwiseAbs().minCoeff(&start);
    KernelSpec model_kernel;
    model_kernel.lengthscales = Vector::Constant(1, cfg.safe_lengthscale);
    model_kernel.variance = cfg.safe_variance;
    model_kernel.noise_variance = cfg.safe_noise_variance;
    const SkewPriorSpec prior = SkewPriorSpec::gaussian(model_kernel);

    ResultTable table;
    table.columns = {"trial", "iteration", "x", "g_x", "valid", "violations", "best_valid_g", "safe_max"};
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t tseed = mix(cfg.seed, static_cast<std::uint64_t>(trial));
        std::mt19937_64 rng(tseed);
        std::uniform_real_distribution<double> ul(cfg.safe_true_lengthscale_lo, cfg.safe_true_lengthscale_hi);
        KernelSpec truth = model_kernel;
        truth.lengthscales(0) = ul(rng);
        const Matrix l = psd_factor(kernel_matrix(truth, grid, grid) +
                                    1e-6 * truth.variance * Matrix::Identity(grid.size(), grid.size()));
        Vector g;
        do {
            g = l * standard_normal(rng, grid.size(), 1);
        } while (g(start) < h);  // the start point must be safe
        double safe_max = -std::numeric_limits<double>::infinity();
        for (Index i = 0; i < g.size(); ++i)
            if (g(i) >= h) safe_max = std::max(safe_max, g(i));

        std::vector<Vector> points;
        std::vector<Index> point_grid;
        Dataset data;
        data.valid_threshold = h;
        int violations = 0;
        double best = -std::numeric_limits<double>::infinity();
        auto evaluate = [&](Index gi) {
            const Vector x = Vector::Constant(1, grid(gi));
            const Index k = intern(points, x);
            if (static_cast<std::size_t>(k) == point_grid.size()) point_grid.push_back(gi);
            const bool valid = g(gi) >= h;
            data.observations.push_back(valid ? ValidObs{k, true, g(gi)} : ValidObs{k, false, std::nullopt});
            if (valid)
                best = std::max(best, g(gi));
            else
                ++violations;
            return valid;
        };
        evaluate(start);
        for (int it = 1; it <= cfg.budget; ++it) {
            data.inputs = stack(points, 1);
            const std::uint64_t iseed = mix(tseed, static_cast<std::uint64_t>(it));
            const FittedModel model = fit(prior, assemble(data, std::sqrt(model_kernel.noise_variance)),
                                          sampling_options(cfg.n_samples, iseed));
            const Matrix f = model.sample_marginals(grid, cfg.n_samples, iseed ^ 0x5afeULL);
            const Index pick = acquire(f, acq).best;
            const bool valid = evaluate(pick);
            table.add({std::to_string(trial), std::to_string(it), format_number(grid(pick)), format_number(g(pick)),
                       valid ? "1" : "0", std::to_string(violations), format_number(best), format_number(safe_max)});
        }
    }
    return table;
}

ResultTable run_active_learning(const ExperimentConfig& cfg) {
    cfg.validate();
    AcqConfig acq = cfg.acquisition;
    acq.kind = AcqKind::bald;
    acq.n_samples = cfg.n_samples;
    const Dataset all = cfg.dataset_path.empty()
                            ? generate_synthetic("separable_2d", {cfg.pool_size + cfg.test_size, 2}, cfg.seed)
                            : load_classification_csv(cfg.dataset_path);
    const Index n = all.inputs.rows(), d = all.inputs.cols();
    Vector labels(n);
    for (const Observation& o : all.observations) {
        const auto* c = std::get_if<ClassObs>(&o);
        if (!c) throw InputError("active learning needs a classification dataset");
        labels(c->index) = c->label == 0 ? -1 : c->label;
    }
    ResultTable table;
    table.columns = {"trial", "step", "n_labelled", "accuracy", "diversity"};
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t tseed = mix(cfg.seed, static_cast<std::uint64_t>(trial));
        std::mt19937_64 rng(tseed);
        std::vector<Index> order(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::shuffle(order.begin(), order.end(), rng);
        // Small files are split in the configured test:pool proportion.
        Index n_test = cfg.test_size, n_pool = cfg.pool_size;
        if (n < n_test + n_pool) {
            n_test = n * cfg.test_size / (cfg.test_size + cfg.pool_size);
            n_pool = n - n_test;
        }
        if (n_pool < 1 || n_test < 1) throw InputError("active learning: dataset too small");
        const std::vector<Index> test(order.begin(), order.begin() + n_test);
        const std::vector<Index> pool(order.begin() + n_test, order.begin() + n_test + n_pool);
        const Matrix test_x = select_rows(all.inputs, test);
        const Matrix pool_x = select_rows(all.inputs, pool);

        std::vector<Index> labelled;  // positions in `pool`, repeats allowed
        const int initial = static_cast<int>(std::min<Index>(cfg.initial_pool, n_pool));
        for (int k = 0; k < initial; ++k) labelled.push_back(k);  // pool is already shuffled
        std::vector<Index> acquired;
        Vector lo = all.inputs.colwise().minCoeff().transpose(), hi = all.inputs.colwise().maxCoeff().transpose();
        KernelSpec kernel = start_kernel(cfg, lo, hi, 1.0);
        for (int step = 0; step <= cfg.budget; ++step) {
            std::vector<Vector> points;
            Dataset data;
            for (Index p : labelled) {
                const Index k = intern(points, pool_x.row(p).transpose());
                data.observations.push_back(ClassObs{k, static_cast<int>(labels(pool[static_cast<std::size_t>(p)]))});
            }
            data.inputs = stack(points, d);
            const std::uint64_t iseed = mix(tseed, static_cast<std::uint64_t>(step) + 1);
            if (cfg.refit && step % cfg.refit_every == 0) kernel = refit_kernel(kernel, data, cfg.fit, iseed);
            const FittedModel model =
                fit(SkewPriorSpec::gaussian(kernel), assemble(data, 1.0), sampling_options(cfg.n_samples, iseed));
            const Vector p = model.class_probability(test_x);
            double correct = 0;
            for (Index i = 0; i < n_test; ++i)
                correct += ((p(i) >= 0.5 ? 1.0 : -1.0) == labels(test[static_cast<std::size_t>(i)])) ? 1.0 : 0.0;
            const std::set<Index> unique(acquired.begin(), acquired.end());
            const double diversity = acquired.empty() ? 1.0 : static_cast<double>(unique.size()) / acquired.size();
            table.add({std::to_string(trial), std::to_string(step), std::to_string(labelled.size()),
                       format_number(correct / n_test), format_number(diversity)});
            if (step == cfg.budget) break;
            const Matrix f = model.sample_marginals(pool_x, cfg.n_samples, iseed ^ 0xba1dULL);
            const Index pick = acquire(f, acq).best;
            labelled.push_back(pick);
            acquired.push_back(pick);
        }
    }
    return table;
}

ResultTable run_sample_bench(const ExperimentConfig& cfg) {
    cfg.validate();
    using clock = std::chrono::steady_clock;
    ResultTable table;
    table.columns = {"n",           "factor_seconds",     "sample_seconds", "per_sample_seconds",
                     "gelman_rubin", "gelman_rubin_median"};
    for (Index n : cfg.sizes) {
        if (n < 2) throw InputError("sample_bench: sizes must be >= 2");
        std::mt19937_64 rng(mix(cfg.seed, static_cast<std::uint64_t>(n)));
        KernelSpec truth;
        const Dataset data = classification_problem(n, 3, rng, &truth);

        // One-time work: posterior blocks, the Gamma factor and the residual factor.
        const auto t0 = clock::now();
        FitOptions o;
        o.n_samples = 0;
        o.burn_in = 0;
        o.marginal = MarginalMode::none;
        const FittedModel model = fit(SkewPriorSpec::gaussian(truth), assemble(data, 1.0), o);
        const ProcessPtr post = model.process();
        const Matrix b = post->skew_cov(data.inputs);
        const Eigen::LLT<Matrix> gamma_llt(post->gamma_mat());
        const Matrix coef = gamma_llt.solve(b.transpose());  // n x n
        const Matrix resid = psd_factor(symmetrize(post->cov(data.inputs, data.inputs) - b * coef), "residual");
        const Vector mean = post->mean(data.inputs);
        TruncSpec spec;
        spec.gamma = post->gamma();
        spec.gamma_mat = post->gamma_mat();
        spec.burn_in = cfg.bench_burn_in;
        const auto t1 = clock::now();

        // Draws of the latent function at the training inputs.
        auto latent_draws = [&](std::uint64_t seed) {
            spec.seed = seed;
            LinEssChain chain(spec);
            const Matrix t = chain.sample(cfg.bench_samples);
            std::mt19937_64 eps_rng(seed ^ 0xe95ULL);
            Matrix f = t * coef;
            f.noalias() += (resid.triangularView<Eigen::Lower>() * standard_normal(eps_rng, n, cfg.bench_samples))
                               .transpose();
            f.rowwise() += mean.transpose();
            return f;
        };
        // best of bench_repeats timings of the same seeded run
        double sampling = std::numeric_limits<double>::infinity();
        Matrix a;
        for (int rep = 0; rep < cfg.bench_repeats; ++rep) {
            const auto t2 = clock::now();
            a = latent_draws(mix(cfg.seed, 1));
            sampling = std::min(sampling, std::chrono::duration<double>(clock::now() - t2).count());
        }
        const Matrix c = latent_draws(mix(cfg.seed, 2));
        std::vector<double> psrf;
        for (Index j = 0; j < n; ++j) psrf.push_back(gelman_rubin({Matrix(a.col(j)), Matrix(c.col(j))}));
        std::sort(psrf.begin(), psrf.end());
        const double factor = std::chrono::duration<double>(t1 - t0).count();
        table.add({std::to_string(n), format_number(factor), format_number(sampling),
                   format_number(sampling / static_cast<double>(cfg.bench_samples)), format_number(psrf.back()),
                   format_number(psrf[psrf.size() / 2])});
    }
    return table;
}

}  // namespace skewgp
