#include "skewgp/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace skewgp {

AcqKind parse_acq_kind(const std::string& name) {
    if (name == "bald") return AcqKind::bald;
    if (name == "dueling_ucb" || name == "ucb") return AcqKind::dueling_ucb;
    if (name == "eiig") return AcqKind::eiig;
    if (name == "safe_ucb") return AcqKind::safe_ucb;
    throw InputError("unknown acquisition '" + name + "'");
}

std::string to_string(AcqKind kind) {
    switch (kind) {
        case AcqKind::bald: return "bald";
        case AcqKind::dueling_ucb: return "dueling_ucb";
        case AcqKind::eiig: return "eiig";
        case AcqKind::safe_ucb: return "safe_ucb";
    }
    return "unknown";
}

void AcqConfig::validate() const {
    if (!(credible_level > 0.0 && credible_level < 1.0)) throw InputError("acquisition: credible_level must be in (0, 1)");
    if (n_samples < 100) throw InputError("acquisition: n_samples must be >= 100");
    if (!(noise > 0.0)) throw InputError("acquisition: noise must be positive");
    if (!(eiig_k >= 0.0)) throw InputError("acquisition: eiig_k must be nonnegative");
    if (!(safe_prob >= 0.0 && safe_prob <= 1.0)) throw InputError("acquisition: safe_prob must be in [0, 1]");
}

double binary_entropy(double p) {
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double bald(const Vector& prob_samples) {
    if (prob_samples.size() == 0) throw InputError("bald: no samples");
    double mean = 0.0, mean_h = 0.0;
    for (double p : prob_samples) {
        const double c = std::clamp(p, 1e-12, 1.0 - 1e-12);
        mean += c;
        mean_h += binary_entropy(c);
    }
    const double m = static_cast<double>(prob_samples.size());
    return std::max(0.0, binary_entropy(mean / m) - mean_h / m);
}

Interval min_width_interval(const Vector& samples, double level) {
    const Index m = samples.size();
    if (m == 0) throw InputError("min_width_interval: no samples");
    if (!(level > 0.0 && level <= 1.0)) throw InputError("min_width_interval: level must be in (0, 1]");
    std::vector<double> s(samples.data(), samples.data() + m);
    std::sort(s.begin(), s.end());
    const auto window = std::clamp<Index>(static_cast<Index>(std::ceil(level * static_cast<double>(m) - 1e-9)), 1, m);
    Index start = 0;
    double width = s[window - 1] - s[0];
    for (Index i = 1; i + window <= m; ++i) {
        const double w = s[i + window - 1] - s[i];
        if (w < width) {
            width = w;
            start = i;
        }
    }
    return {s[start], s[start + window - 1]};
}

double dueling_ucb(const Vector& diff_samples, double level) { return min_width_interval(diff_samples, level).upper; }

double eiig(const Vector& diff_samples, double k, double sigma) {
    if (diff_samples.size() == 0) throw InputError("eiig: no samples");
    double mean = 0.0, mean_h = 0.0;
    const double scale = 1.0 / (std::sqrt(2.0) * sigma);
    for (double d : diff_samples) {
        const double q = norm_cdf(d * scale);
        mean += q;
        mean_h += binary_entropy(q);
    }
    const double m = static_cast<double>(diff_samples.size());
    mean /= m;
    mean_h /= m;
    return k * std::log(std::max(mean, 1e-300)) - (binary_entropy(mean) - mean_h);
}

double safe_ucb(const Vector& f_samples, const AcqConfig& config) {
    const double ucb = dueling_ucb(f_samples, config.credible_level);
    const double safe = (f_samples.array() >= config.safe_threshold).cast<double>().mean();
    return safe < config.safe_prob ? ucb - config.safe_penalty : ucb;
}

AcquisitionResult acquire(const Matrix& latent, const AcqConfig& config, const std::optional<Vector>& reference) {
    config.validate();
    const bool relative = config.kind == AcqKind::dueling_ucb || config.kind == AcqKind::eiig;
    if (relative && !reference) throw InputError("acquire: " + to_string(config.kind) + " needs reference draws");
    if (reference && reference->size() != latent.rows())
        throw InputError("acquire: reference draws must match the latent draws");
    AcquisitionResult out;
    out.kind = config.kind;
    out.scores.resize(latent.cols());
    for (Index j = 0; j < latent.cols(); ++j) {
        const Vector f = latent.col(j);
        switch (config.kind) {
            case AcqKind::bald:
                out.scores(j) = bald(f.unaryExpr([](double v) { return norm_cdf(v); }));
                break;
            case AcqKind::dueling_ucb:
                out.scores(j) = dueling_ucb(f - *reference, config.credible_level);
                break;
            case AcqKind::eiig:
                out.scores(j) = eiig(f - *reference, config.eiig_k, config.noise);
                break;
            case AcqKind::safe_ucb:
                out.scores(j) = safe_ucb(f, config);
                break;
        }
    }
    if (latent.cols() > 0) out.scores.maxCoeff(&out.best);
    return out;
}

}  // namespace skewgp
