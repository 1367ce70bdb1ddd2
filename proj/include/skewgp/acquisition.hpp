#pragma once

#include "skewgp/common.hpp"

#include <optional>
#include <string>

namespace skewgp {

enum class AcqKind { bald, dueling_ucb, eiig, safe_ucb };

AcqKind parse_acq_kind(const std::string& name);
std::string to_string(AcqKind kind);

struct AcqConfig {
    AcqKind kind = AcqKind::dueling_ucb;
    double credible_level = 0.95;
    double eiig_k = 0.1;
    double safe_threshold = 0.0;
    double safe_prob = 0.7;
    double safe_penalty = 1000.0;
    Index n_samples = 3000;
    double noise = 1.0;  // probit scale sigma of the duel likelihood (eiig)

    void validate() const;
};

/// Binary entropy in nats, with p clamped to [1e-12, 1 - 1e-12].
double binary_entropy(double p);

/// h(mean p) - mean h(p) over samples p = Phi(f(x)).
double bald(const Vector& prob_samples);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Shortest interval holding ceil(level * m) of the sorted samples; ties go
/// to the lowest start.
Interval min_width_interval(const Vector& samples, double level);

/// Upper end of the minimum-width credible interval of f(x) - f(x_r).
double dueling_ucb(const Vector& diff_samples, double level);

/// k log(mean q) - (h(mean q) - mean h(q)) with q = Phi(delta / (sqrt(2) sigma)).
double eiig(const Vector& diff_samples, double k, double sigma);

/// Credible upper bound of f(x) minus safe_penalty when the fraction of
/// samples >= safe_threshold is below safe_prob.
double safe_ucb(const Vector& f_samples, const AcqConfig& config);

struct AcquisitionResult {
    AcqKind kind = AcqKind::dueling_ucb;
    Vector scores;    // one per candidate
    Index best = -1;  // argmax, lowest index on ties
};

/// Scores every column of `latent` (m draws x q candidates). Dueling UCB and
/// EIIG use f(x) - f(x_r) and need `reference`, the m draws of f(x_r) taken
/// jointly with `latent`.
AcquisitionResult acquire(const Matrix& latent, const AcqConfig& config,
                          const std::optional<Vector>& reference = std::nullopt);

}  // namespace skewgp
