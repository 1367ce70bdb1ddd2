// skewgp command-line harness.
//
//   skewgp <task> --config cfg.json --seed 3 --out result.csv
//
// Tasks: fit, predict, active_learn, pbo, mixed_bo, safe_bo, sample_bench,
// generate. Exit codes: 0 ok, 2 input error, 3 numeric error.

#include "skewgp/experiments.hpp"
#include "skewgp/io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

using namespace skewgp;

namespace {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SkewGP experiments and model fitting"};
    std::string task_name, config_path, out, dataset_path, model_path, points_path, benchmark_name, acq_name, kind;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget, trials;
    std::optional<double> duel_noise;
    std::optional<Index> n_samples, generate_n;
    bool no_refit = false;
    app.add_option("task", task_name, "fit | predict | active_learn | pbo | mixed_bo | safe_bo | sample_bench | generate")
        ->required();
    app.add_option("--config", config_path, "experiment config JSON");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output path (stdout when omitted)");
    app.add_option("--budget", budget, "acquisition budget");
    app.add_option("--trials", trials, "number of repetitions");
    app.add_option("--benchmark", benchmark_name, "benchmark function");
    app.add_option("--acquisition", acq_name, "bald | dueling_ucb | eiig | safe_ucb");
    app.add_option("--duel-noise", duel_noise, "probit noise of simulated duels");
    app.add_option("--samples", n_samples, "posterior draws per step");
    app.add_flag("--no-refit", no_refit, "keep hyperparameters fixed");
    app.add_option("--dataset", dataset_path, "dataset JSON (fit) or classification CSV (active_learn)");
    app.add_option("--model", model_path, "fitted model JSON (predict)");
    app.add_option("--points", points_path, "JSON array of query points (predict)");
    app.add_option("--kind", kind, "synthetic kind (generate)");
    app.add_option("--n", generate_n, "synthetic size (generate)");
    CLI11_PARSE(app, argc, argv);

    try {
        const Task task = parse_task(task_name);
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : config_from_json(read_file(config_path));
        cfg.task = task;
        if (seed) cfg.seed = *seed;
        if (budget) cfg.budget = *budget;
        if (trials) cfg.trials = *trials;
        if (!benchmark_name.empty()) cfg.benchmark = benchmark_name;
        if (!acq_name.empty()) cfg.acquisition.kind = parse_acq_kind(acq_name);
        if (duel_noise) cfg.duel_noise = *duel_noise;
        if (n_samples) cfg.n_samples = cfg.acquisition.n_samples = *n_samples;
        if (no_refit) cfg.refit = false;
        if (!kind.empty()) cfg.generate_kind = kind;
        if (generate_n) cfg.generate_n = *generate_n;
        if (!out.empty()) cfg.output_path = out;
        if (task == Task::active_learn && !dataset_path.empty()) cfg.dataset_path = dataset_path;
        cfg.validate();

        switch (task) {
            case Task::fit: {
                if (dataset_path.empty()) throw InputError("fit needs --dataset");
                const Dataset data = dataset_from_json(read_file(dataset_path));
                const Vector lo = data.inputs.colwise().minCoeff().transpose();
                const Vector hi = data.inputs.colwise().maxCoeff().transpose();
                KernelSpec k;
                if (cfg.kernel) {
                    k = *cfg.kernel;
                } else {
                    k.lengthscales = (0.2 * (hi - lo)).cwiseMax(1e-3);
                    k.noise_variance = 1.0;
                }
                FittedModel model;
                if (cfg.refit) {
                    FitConfig fc = cfg.fit;
                    fc.seed = cfg.seed;
                    fc.final_fit.n_samples = cfg.n_samples;
                    fc.final_fit.seed = cfg.seed;
                    model = optimize(SkewPriorSpec::gaussian(k), data, fc).model;
                } else {
                    FitOptions o;
                    o.n_samples = cfg.n_samples;
                    o.seed = cfg.seed;
                    model = fit(SkewPriorSpec::gaussian(k), assemble(data, std::sqrt(k.noise_variance)), o);
                }
                emit(cfg.output_path, model_to_json(model) + "\n");
                break;
            }
            case Task::predict: {
                if (model_path.empty() || points_path.empty()) throw InputError("predict needs --model and --points");
                const FittedModel model = model_from_json(read_file(model_path));
                const Dataset pts = dataset_from_json("{\"inputs\":" + read_file(points_path) + ",\"observations\":[]}");
                const Matrix draws = model.sample_marginals(pts.inputs, cfg.n_samples, cfg.seed);
                ResultTable t;
                t.columns = {"point", "mean", "sd", "q05", "q95"};
                for (Index i = 0; i < pts.inputs.rows(); ++i) {
                    std::vector<double> col(draws.col(i).data(), draws.col(i).data() + draws.rows());
                    std::sort(col.begin(), col.end());
                    const auto q = [&](double p) { return col[static_cast<std::size_t>(p * (col.size() - 1))]; };
                    const double mu = draws.col(i).mean();
                    const double sd = std::sqrt((draws.col(i).array() - mu).square().mean());
                    t.add({std::to_string(i), format_number(mu), format_number(sd),
                           format_number(q(0.05)), format_number(q(0.95))});
                }
                emit(cfg.output_path, t.to_csv(cfg));
                break;
            }
            case Task::generate: {
                SyntheticParams p;
                p.n = cfg.generate_n;
                emit(cfg.output_path, dataset_to_json(generate_synthetic(cfg.generate_kind, p, cfg.seed)) + "\n");
                break;
            }
            case Task::active_learn: emit(cfg.output_path, run_active_learning(cfg).to_csv(cfg)); break;
            case Task::pbo: emit(cfg.output_path, run_pbo(cfg).to_csv(cfg)); break;
            case Task::mixed_bo: emit(cfg.output_path, run_mixed_bo(cfg).to_csv(cfg)); break;
            case Task::safe_bo: emit(cfg.output_path, run_safe_bo(cfg).to_csv(cfg)); break;
            case Task::sample_bench: {
                const ResultTable t = run_sample_bench(cfg);
                emit(cfg.output_path, t.to_csv(cfg));
                if (t.rows.size() >= 2)
                    std::cerr << "per-sample cost exponent: "
                              << power_law_exponent(t.column("n"), t.column("per_sample_seconds")) << "\n";
                break;
            }
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
