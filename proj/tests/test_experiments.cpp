#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "skewgp/experiments.hpp"
#include "skewgp/io.hpp"

#include <cstdio>
#include <set>

using namespace skewgp;

namespace {

ExperimentConfig small_pbo() {
    ExperimentConfig c;
    c.task = Task::pbo;
    c.trials = 2;
    c.budget = 9;
    c.candidates = 41;
    c.n_samples = 400;
    c.acquisition.n_samples = 400;
    c.fit.restarts = 1;
    c.fit.anneal_steps = 10;
    c.fit.local_iterations = 5;
    return c;
}

std::vector<std::string> column_text(const ResultTable& t, const std::string& name) {
    const auto k = static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin());
    std::vector<std::string> out;
    for (const auto& r : t.rows) out.push_back(r.at(k));
    return out;
}

}  // namespace

TEST_CASE("task names and config JSON") {
    for (Task t : {Task::fit, Task::predict, Task::active_learn, Task::pbo, Task::mixed_bo, Task::safe_bo,
                   Task::sample_bench, Task::generate})
        CHECK(parse_task(to_string(t)) == t);
    CHECK_THROWS_AS(parse_task("train"), InputError);

    ExperimentConfig c = small_pbo();
    c.kernel = KernelSpec{};
    c.kernel->lengthscales = Vector::Constant(1, 0.4);
    const std::string text = config_to_json(c);
    CHECK(config_to_json(config_from_json(text)) == text);
    CHECK_THROWS_AS(config_from_json(R"({"budjet": 3})"), InputError);
    CHECK_THROWS_AS(config_from_json(R"({"budget": "many"})"), InputError);
    CHECK_THROWS_AS(config_from_json(R"({"trials": 0})"), InputError);
    CHECK_THROWS_AS(config_from_json(R"({"acquisition": "thompson"})"), InputError);
    CHECK_THROWS_AS(config_from_json("[1, 2]"), InputError);
}

TEST_CASE("experiments are reproducible and carry a header") {
    const ExperimentConfig c = small_pbo();
    const std::string a = run_pbo(c).to_csv(c);
    CHECK(a == run_pbo(c).to_csv(c));
    CHECK(a.rfind("# skewgp " + library_version() + " task=pbo seed=0 config_hash=", 0) == 0);
    ExperimentConfig other = c;
    other.seed = 1;
    const std::string b = run_pbo(other).to_csv(other);
    CHECK(a.substr(0, a.find('\n')) != b.substr(0, b.find('\n')));
}

TEST_CASE("pbo rows track the incumbent") {
    const ExperimentConfig c = small_pbo();
    const ResultTable t = run_pbo(c);
    CHECK(t.rows.size() == static_cast<std::size_t>(c.trials * (c.budget - c.initial_duels + 1)));
    const auto trial = t.column("trial"), g = t.column("g_x_r"), best = t.column("best_g_x_r"),
               duels = t.column("n_duels");
    const BenchmarkFunction f = benchmark("one_d");
    const auto xr = t.column("x_r");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(g[i] == doctest::Approx(f(Vector::Constant(1, xr[i]))).epsilon(1e-8));
        CHECK(best[i] <= f.optimum + 1e-12);
        CHECK(best[i] >= g[i]);
        if (i > 0 && trial[i] == trial[i - 1]) {
            CHECK(best[i] >= best[i - 1]);
            CHECK(duels[i] == duels[i - 1] + 1);
        }
    }
    CHECK(duels.back() == c.budget);
}

TEST_CASE("mixed schedule queries g at iterations 4, 8, ...") {
    ExperimentConfig c = small_pbo();
    c.task = Task::mixed_bo;
    c.trials = 1;
    c.budget = 12;
    const ResultTable t = run_mixed_bo(c);
    const auto query = column_text(t, "query");
    const auto it = t.column("iteration"), num = t.column("n_numeric");
    REQUIRE(t.rows.size() == 13);
    CHECK(query[0] == "initial");
    CHECK(num[0] == c.initial_numeric);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const bool numeric = static_cast<int>(it[i]) % 4 == 0;
        CHECK(query[i] == (numeric ? "numeric" : "duel"));
        CHECK(num[i] == num[i - 1] + (numeric ? 1 : 0));
    }
}

TEST_CASE("duel noise and eiig are accepted") {
    ExperimentConfig c = small_pbo();
    c.trials = 1;
    c.budget = 7;
    c.duel_noise = 0.3;
    c.acquisition.kind = AcqKind::eiig;
    CHECK(run_pbo(c).rows.size() == 3);
    c.acquisition.kind = AcqKind::bald;
    CHECK_THROWS_AS(run_pbo(c), InputError);
    c.acquisition.kind = AcqKind::dueling_ucb;
    c.benchmark = "six_hump_camel";
    c.refit = false;
    const ResultTable t = run_pbo(c);
    CHECK(t.column("optimum").front() == doctest::Approx(1.031628453489877));
}

TEST_CASE("safe BO log") {
    ExperimentConfig c;
    c.task = Task::safe_bo;
    c.trials = 2;
    c.budget = 6;
    c.safe_grid = 61;
    c.n_samples = 500;
    const ResultTable t = run_safe_bo(c);
    REQUIRE(t.rows.size() == 12);
    const auto trial = t.column("trial"), viol = t.column("violations"), valid = t.column("valid"),
               gx = t.column("g_x"), best = t.column("best_valid_g"), smax = t.column("safe_max");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(valid[i] == (gx[i] >= 0.0 ? 1.0 : 0.0));
        CHECK(best[i] <= smax[i] + 1e-12);
        CHECK(best[i] >= 0.0);  // the start point is safe
        if (i > 0 && trial[i] == trial[i - 1]) CHECK(viol[i] == viol[i - 1] + (1.0 - valid[i]));
    }
    CHECK(run_safe_bo(c).to_csv(c) == t.to_csv(c));
}

TEST_CASE("active learning edge cases") {
    ExperimentConfig c;
    c.task = Task::active_learn;
    c.trials = 3;
    c.budget = 0;
    c.n_samples = 300;
    c.refit = false;
    ResultTable t = run_active_learning(c);
    CHECK(t.rows.size() == 3);
    for (double s : t.column("step")) CHECK(s == 0);
    CHECK(t.column("n_labelled").front() == 10);

    // one pool point: every acquisition repeats it
    c.trials = 1;
    c.budget = 3;
    c.pool_size = 1;
    c.initial_pool = 1;
    c.test_size = 30;
    t = run_active_learning(c);
    const auto div = t.column("diversity"), lab = t.column("n_labelled");
    REQUIRE(t.rows.size() == 4);
    for (int s = 1; s <= 3; ++s) {
        CHECK(lab[s] == 1 + s);
        CHECK(div[s] == doctest::Approx(1.0 / s));
    }
}

TEST_CASE("active learning on separable data improves accuracy") {
    ExperimentConfig c;
    c.task = Task::active_learn;
    c.trials = 10;
    c.budget = 30;
    c.n_samples = 500;
    c.fit.restarts = 1;
    c.fit.anneal_steps = 10;
    c.fit.local_iterations = 5;
    c.refit_every = 5;
    const ResultTable t = run_active_learning(c);
    const auto trial = t.column("trial"), step = t.column("step"), acc = t.column("accuracy");
    int improved = 0;
    for (int k = 0; k < c.trials; ++k) {
        double first = -1, last = -1;
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            if (trial[i] == k) {
                if (step[i] == 0) first = acc[i];
                if (step[i] == c.budget) last = acc[i];
            }
        if (last >= first) ++improved;
    }
    CHECK(improved >= 9);
}

TEST_CASE("classification CSV loader") {
    const std::string path = "skewgp_al_test.csv";
    write_file(path, "x1,x2,class\n0.1,0.2,0\n0.5,-1,2\n1,1,1\n0.3,0.3,0\n");
    const Dataset d = load_classification_csv(path);
    CHECK(d.inputs.rows() == 4);
    CHECK(d.inputs.cols() == 2);
    std::vector<int> labels;
    for (const auto& o : d.observations) labels.push_back(std::get<ClassObs>(o).label);
    CHECK(labels == std::vector<int>{1, -1, -1, 1});
    write_file(path, "0.1,0.2,0\n0.5,1\n");
    CHECK_THROWS_AS(load_classification_csv(path), InputError);
    write_file(path, "0.1,0.2,0\n0.5,abc,1\n");
    CHECK_THROWS_AS(load_classification_csv(path), InputError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_classification_csv(path), InputError);
}

TEST_CASE("synthetic generators") {
    const std::string a = dataset_to_json(generate_synthetic("preference_1d", {}, 4));
    CHECK(a == dataset_to_json(generate_synthetic("preference_1d", {}, 4)));
    const Dataset p = dataset_from_json(a);
    CHECK(p.inputs.rows() == 25);
    CHECK(p.observations.size() == 45);
    CHECK(p.inputs.maxCoeff() <= 2.6);
    CHECK(p.inputs.minCoeff() >= -2.6);
    const BenchmarkFunction g = benchmark("one_d");
    for (const auto& o : p.observations) {
        const auto& pr = std::get<PrefObs>(o);
        CHECK(g(p.inputs.row(pr.winner).transpose()) >= g(p.inputs.row(pr.loser).transpose()));
    }

    const Dataset m = generate_synthetic("mixed_1d", {}, 4);
    int numeric = 0, prefs = 0;
    for (const auto& o : m.observations) {
        if (const auto* n = std::get_if<NumObs>(&o)) {
            ++numeric;
            const double x = m.inputs(n->indices[0], 0);
            CHECK(x < 2.5);
            CHECK(n->value == mixed_test_function(x));
        } else {
            const auto& pr = std::get<PrefObs>(o);
            ++prefs;
            for (Index i : {pr.winner, pr.loser}) {
                CHECK(m.inputs(i, 0) >= 2.5);
                CHECK(m.inputs(i, 0) <= 5.0);
            }
        }
    }
    CHECK(numeric > 0);
    CHECK(prefs == 30);

    // labels are symmetric Bernoulli(Phi(f)) draws: about half positive
    double positive = 0, total = 0;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const Dataset c = generate_synthetic("classification", {1000, 3}, s);
        CHECK(c.inputs.cols() == 3);
        for (const auto& o : c.observations) {
            const int y = std::get<ClassObs>(o).label;
            CHECK((y == 1 || y == -1));
            positive += y == 1;
            ++total;
        }
    }
    CHECK(std::abs(positive / total - 0.5) < 0.12);
    CHECK_THROWS_AS(generate_synthetic("spiral", {}, 0), InputError);
}

TEST_CASE("power law fit and sampling benchmark") {
    const std::vector<double> n = {100, 200, 400, 800};
    std::vector<double> t;
    for (double v : n) t.push_back(3e-9 * v * v);
    CHECK(power_law_exponent(n, t) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(power_law_exponent({1.0}, {1.0}), InputError);

    ExperimentConfig c;
    c.task = Task::sample_bench;
    c.sizes = {40, 80};
    c.bench_samples = 300;
    const ResultTable r = run_sample_bench(c);
    REQUIRE(r.rows.size() == 2);
    for (double v : r.column("per_sample_seconds")) CHECK(v > 0);
    for (double v : r.column("gelman_rubin")) CHECK(v >= 1.0);
}
