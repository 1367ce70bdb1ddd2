#include "skewgp/io.hpp"

#include "json.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace skewgp {

using nlohmann::json;

namespace {

#ifndef SKEWGP_VERSION
#define SKEWGP_VERSION "0.0.0"
#endif

json to_j(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_j(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw InputError(where + ": expected a number");
    return j.get<double>();
}

Index integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
    return j.get<Index>();
}

Vector vec(const json& j, const std::string& where) {
    if (!j.is_array()) throw InputError(where + ": expected an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], where);
    return v;
}

// Rows of equal length; `cols` fixes the width of an empty matrix.
Matrix mat(const json& j, const std::string& where, Index cols = 0) {
    if (!j.is_array()) throw InputError(where + ": expected an array of rows");
    if (j.empty()) return Matrix(0, cols);
    const Index c = j[0].is_array() ? static_cast<Index>(j[0].size()) : 1;
    Matrix m(static_cast<Index>(j.size()), c);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array()) {
            if (c != 1) throw InputError(where + ": ragged rows");
            m(static_cast<Index>(i), 0) = number(j[i], where);
            continue;
        }
        if (static_cast<Index>(j[i].size()) != c) throw InputError(where + ": ragged rows");
        for (Index k = 0; k < c; ++k) m(static_cast<Index>(i), k) = number(j[i][static_cast<std::size_t>(k)], where);
    }
    return m;
}

json parse(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(where + ": invalid JSON (" + e.what() + ")");
    }
}

json kernel_j(const KernelSpec& k) {
    return {{"lengthscales", to_j(k.lengthscales)}, {"variance", k.variance}, {"noise_variance", k.noise_variance}};
}

KernelSpec kernel_of(const json& j) {
    KernelSpec k;
    k.lengthscales = vec(field(j, "lengthscales", "kernel"), "kernel.lengthscales");
    k.variance = number(field(j, "variance", "kernel"), "kernel.variance");
    k.noise_variance = j.contains("noise_variance") ? number(j["noise_variance"], "kernel.noise_variance") : 0.0;
    k.validate();
    return k;
}

json prior_j(const SkewPriorSpec& p) {
    json j = {{"kernel", kernel_j(p.kernel)},
              {"latent_dim", p.latent_dim},
              {"pseudo_points", to_j(p.pseudo_points)},
              {"phase", to_j(p.phase)}};
    if (p.mean_constant != 0.0) j["mean_constant"] = p.mean_constant;
    return j;
}

SkewPriorSpec prior_of(const json& j) {
    SkewPriorSpec p;
    // kernel fields may sit in a nested object or at the top level
    p.kernel = kernel_of(j.contains("kernel") ? j["kernel"] : j);
    p.latent_dim = j.contains("latent_dim") ? integer(j["latent_dim"], "prior.latent_dim") : 0;
    p.pseudo_points = j.contains("pseudo_points") ? mat(j["pseudo_points"], "prior.pseudo_points", p.kernel.dim())
                                                  : Matrix(0, p.kernel.dim());
    p.phase = j.contains("phase") ? vec(j["phase"], "prior.phase") : Vector(0);
    p.mean_constant = j.contains("mean_constant") ? number(j["mean_constant"], "prior.mean_constant") : 0.0;
    p.validate();
    return p;
}

json obs_j(const ObservationSet& o) {
    return {{"inputs", to_j(o.inputs)},
            {"numeric", {{"y", to_j(o.numeric.y)}, {"c", to_j(o.numeric.c)}, {"r", to_j(o.numeric.r)}}},
            {"probit", {{"z", to_j(o.probit.z)}, {"w", to_j(o.probit.w)}, {"sigma", to_j(o.probit.sigma)}}}};
}

ObservationSet obs_of(const json& j) {
    ObservationSet o;
    o.inputs = mat(field(j, "inputs", "observations"), "observations.inputs");
    const Index n = o.inputs.rows();
    const json& num = field(j, "numeric", "observations");
    o.numeric.y = vec(field(num, "y", "numeric"), "numeric.y");
    o.numeric.c = mat(field(num, "c", "numeric"), "numeric.c", n);
    o.numeric.r = mat(field(num, "r", "numeric"), "numeric.r", 0);
    const json& pr = field(j, "probit", "observations");
    o.probit.z = vec(field(pr, "z", "probit"), "probit.z");
    o.probit.w = mat(field(pr, "w", "probit"), "probit.w", n);
    o.probit.sigma = mat(field(pr, "sigma", "probit"), "probit.sigma", 0);
    o.validate();
    return o;
}

json options_j(const FitOptions& o) {
    return {{"n_samples", o.n_samples}, {"burn_in", o.burn_in},     {"thin", o.thin},
            {"seed", o.seed},           {"block_size", o.block_size}, {"partition_seed", o.partition_seed},
            {"marginal", static_cast<int>(o.marginal)}, {"cdf_method", static_cast<int>(o.cdf_method)}};
}

FitOptions options_of(const json& j) {
    FitOptions o;
    o.n_samples = integer(field(j, "n_samples", "options"), "options.n_samples");
    o.burn_in = static_cast<int>(integer(field(j, "burn_in", "options"), "options.burn_in"));
    o.thin = static_cast<int>(integer(field(j, "thin", "options"), "options.thin"));
    o.seed = field(j, "seed", "options").get<std::uint64_t>();
    o.block_size = integer(field(j, "block_size", "options"), "options.block_size");
    o.partition_seed = field(j, "partition_seed", "options").get<std::uint64_t>();
    o.marginal = static_cast<MarginalMode>(integer(field(j, "marginal", "options"), "options.marginal"));
    o.cdf_method = static_cast<CdfMethod>(integer(field(j, "cdf_method", "options"), "options.cdf_method"));
    return o;
}

json sun_j(const SunParams& p) {
    return {{"xi", to_j(p.xi)},
            {"omega", to_j(p.omega)},
            {"delta", to_j(p.delta)},
            {"gamma", to_j(p.gamma)},
            {"gamma_mat", to_j(p.gamma_mat)}};
}

json record_j(const Observation& o) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, NumObs>) {
                json j = {{"type", "num"}, {"value", r.value}};
                if (r.indices.size() == 1 && r.weights.empty())
                    j["index"] = r.indices[0];
                else
                    j["indices"] = r.indices;
                if (!r.weights.empty()) j["weights"] = r.weights;
                return j;
            } else if constexpr (std::is_same_v<T, ClassObs>) {
                return {{"type", "class"}, {"index", r.index}, {"label", r.label}};
            } else if constexpr (std::is_same_v<T, PrefObs>) {
                return {{"type", "pref"}, {"winner", r.winner}, {"loser", r.loser}};
            } else if constexpr (std::is_same_v<T, OrdinalObs>) {
                return {{"type", "ordinal"}, {"index", r.index}, {"category", r.category}};
            } else {
                json j = {{"type", "valid"}, {"index", r.index}, {"valid", r.valid}};
                if (r.value) j["value"] = *r.value;
                return j;
            }
        },
        o);
}

Observation record_of(const json& j, std::size_t k) {
    const std::string where = "observations[" + std::to_string(k) + "]";
    const json& t = field(j, "type", where);
    if (!t.is_string()) throw InputError(where + ": type must be a string");
    const std::string type = t.get<std::string>();
    if (type == "num") {
        NumObs r;
        if (j.contains("index")) {
            r.indices = {integer(j["index"], where)};
        } else {
            for (const json& i : field(j, "indices", where)) r.indices.push_back(integer(i, where));
        }
        if (j.contains("weights"))
            for (const json& w : j["weights"]) r.weights.push_back(number(w, where));
        r.value = number(field(j, "value", where), where);
        return r;
    }
    if (type == "class")
        return ClassObs{integer(field(j, "index", where), where),
                        static_cast<int>(integer(field(j, "label", where), where))};
    if (type == "pref")
        return PrefObs{integer(field(j, "winner", where), where), integer(field(j, "loser", where), where)};
    if (type == "ordinal")
        return OrdinalObs{integer(field(j, "index", where), where),
                          static_cast<int>(integer(field(j, "category", where), where))};
    if (type == "valid") {
        ValidObs r;
        r.index = integer(field(j, "index", where), where);
        const json& v = field(j, "valid", where);
        if (!v.is_boolean()) throw InputError(where + ": valid must be a boolean");
        r.valid = v.get<bool>();
        if (j.contains("value")) r.value = number(j["value"], where);
        return r;
    }
    throw InputError(where + ": unknown type '" + type + "'");
}

}  // namespace

std::string library_version() { return SKEWGP_VERSION; }

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write to '" + path + "' failed");
}

std::string kernel_to_json(const KernelSpec& kernel) { return kernel_j(kernel).dump(2); }
KernelSpec kernel_from_json(const std::string& text) { return kernel_of(parse(text, "kernel")); }
std::string prior_to_json(const SkewPriorSpec& prior) { return prior_j(prior).dump(2); }
SkewPriorSpec prior_from_json(const std::string& text) { return prior_of(parse(text, "prior")); }
std::string observations_to_json(const ObservationSet& obs) { return obs_j(obs).dump(2); }
ObservationSet observations_from_json(const std::string& text) { return obs_of(parse(text, "observations")); }

std::string dataset_to_json(const Dataset& data) {
    json obs = json::array();
    for (const Observation& o : data.observations) obs.push_back(record_j(o));
    json j = {{"inputs", to_j(data.inputs)}, {"observations", obs}};
    if (data.ordinal_thresholds.size() > 0) j["ordinal_thresholds"] = to_j(data.ordinal_thresholds);
    if (data.valid_threshold != 0.0) j["valid_threshold"] = data.valid_threshold;
    return j.dump(2);
}

Dataset dataset_from_json(const std::string& text) {
    const json j = parse(text, "dataset");
    Dataset d;
    d.inputs = mat(field(j, "inputs", "dataset"), "dataset.inputs");
    const json& obs = field(j, "observations", "dataset");
    if (!obs.is_array()) throw InputError("dataset: observations must be an array");
    for (std::size_t k = 0; k < obs.size(); ++k) d.observations.push_back(record_of(obs[k], k));
    if (j.contains("ordinal_thresholds")) d.ordinal_thresholds = vec(j["ordinal_thresholds"], "dataset.ordinal_thresholds");
    if (j.contains("valid_threshold")) d.valid_threshold = number(j["valid_threshold"], "dataset.valid_threshold");
    return d;
}

std::string model_to_json(const FittedModel& model) {
    if (!model.prior_spec()) throw InputError("model_to_json: model was not fitted from a prior spec");
    json hist = json::array();
    for (const ObservationSet& o : model.history()) hist.push_back(obs_j(o));
    json j = {{"format", "skewgp-model"},
              {"format_version", kModelFormatVersion},
              {"library_version", library_version()},
              {"prior", prior_j(*model.prior_spec())},
              {"history", hist},
              {"options", options_j(model.options())},
              {"posterior_at_train", sun_j(model.posterior_at_train())}};
    const double lm = model.log_marginal();
    j["log_marginal"] = std::isfinite(lm) ? json(lm) : json(nullptr);
    if (const LinEssChain* c = model.chain()) {
        j["chain"] = {{"seed", c->seed()},
                      {"thin", c->thin()},
                      {"state", to_j(c->state())},
                      {"rng", c->rng_state()},
                      {"steps", c->stats().steps},
                      {"cached_draws", model.cached_draws()}};
    }
    return j.dump(2);
}

FittedModel model_from_json(const std::string& text) {
    const json j = parse(text, "model");
    if (!j.contains("format") || j["format"] != "skewgp-model") throw InputError("model: not a skewgp model file");
    const Index version = integer(field(j, "format_version", "model"), "model.format_version");
    if (version != kModelFormatVersion) throw InputError("model: unsupported format version " + std::to_string(version));
    const SkewPriorSpec prior = prior_of(field(j, "prior", "model"));
    const FitOptions options = options_of(field(j, "options", "model"));
    const json& hist = field(j, "history", "model");
    if (!hist.is_array() || hist.empty()) throw InputError("model: history must be a nonempty array");
    FittedModel model = fit(prior, obs_of(hist[0]), options);
    for (std::size_t k = 1; k < hist.size(); ++k) model = refine(model, obs_of(hist[k]), options);
    if (j.contains("chain")) {
        const LinEssChain* c = model.chain();
        const Vector saved = vec(field(j["chain"], "state", "model.chain"), "model.chain.state");
        if (!c || c->state().size() != saved.size() || (c->state() - saved).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + saved.cwiseAbs().maxCoeff()))
            throw InputError("model: stored chain state does not match the refit (different library version?)");
    }
    return model;
}

}  // namespace skewgp
