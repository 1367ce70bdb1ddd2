#pragma once

#include "skewgp/common.hpp"
#include "skewgp/mvn_cdf.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace skewgp {

/// Gaussian observations Y = C f(X) + noise, noise ~ N(0, R).
struct NumericBlock {
    Vector y;  // m_r
    Matrix c;  // m_r x n
    Matrix r;  // m_r x m_r
    Index size() const { return y.size(); }
};

/// Probit-affine observations with likelihood Phi_{m_a}(Z + W f(X); Sigma).
struct ProbitBlock {
    Vector z;      // m_a
    Matrix w;      // m_a x n
    Matrix sigma;  // m_a x m_a
    Index size() const { return z.size(); }
};

/// Canonical mixed data over the training inputs.
struct ObservationSet {
    Matrix inputs;  // n x d
    NumericBlock numeric;
    ProbitBlock probit;

    Index n() const { return inputs.rows(); }
    bool has_numeric() const { return numeric.size() > 0; }
    bool has_probit() const { return probit.size() > 0; }
    bool empty() const { return !has_numeric() && !has_probit(); }
    /// Sizes, finiteness and positive definiteness of R and Sigma.
    void validate() const;
    /// An observation set with no rows over `inputs`.
    static ObservationSet none(const Matrix& inputs);
};

struct OrdinalSpec {
    Vector thresholds;  // b_1 < ... < b_{r-1}
    double noise = 1.0; // sigma_v
    int categories() const { return static_cast<int>(thresholds.size()) + 1; }
    void validate() const;
};

/// Correlation of the paired rows of an interior ordinal category (-1 + 1e-6).
inline constexpr double kOrdinalPairCorrelation = -1.0 + 1e-6;

/// One numeric observation y of the functional c^T f(X).
struct LinearObservation {
    Vector c;
    double y = 0.0;
};

/// R = sigma_v^2 I; sigma_v == 0 is replaced by a noise variance of 1e-6.
ObservationSet numeric_block(const Matrix& x, const std::vector<LinearObservation>& obs, double noise_sd);
/// Direct noisy observations y_i of f(x_{index_i}).
ObservationSet numeric_block(const Matrix& x, const std::vector<Index>& index, const Vector& y, double noise_sd);

/// One label per input row, in {-1, +1} or {0, 1}.
ObservationSet classification_block(const Matrix& x, const Vector& labels);
/// Labels for a subset of the inputs.
ObservationSet classification_block(const Matrix& x, const std::vector<Index>& index, const Vector& labels);

/// Each duel (winner, loser) gives the row (+e_winner - e_loser) / sigma_v.
ObservationSet preference_block(const Matrix& x, const std::vector<std::pair<Index, Index>>& duels, double noise_sd);

/// Categories in 1..r for the listed inputs.
ObservationSet ordinal_block(const Matrix& x, const std::vector<Index>& index, const std::vector<int>& category,
                             const OrdinalSpec& spec);

struct ValidOutcome {
    Index index = 0;
    bool valid = true;
    std::optional<double> value;  // required iff valid
};

/// Valid points contribute a numeric row and Phi((f - h) / sigma_v); invalid
/// points contribute Phi((h - f) / sigma_v).
ObservationSet valid_invalid_block(const Matrix& x, const std::vector<ValidOutcome>& outcomes, double threshold,
                                   double noise_sd);

/// Stacks rows; R and Sigma become block diagonal. All sets must share the inputs.
ObservationSet merge(const std::vector<ObservationSet>& sets);
ObservationSet merge(const ObservationSet& a, const ObservationSet& b);

/// log Phi_{m_a}(Z + W f; Sigma) + log phi_{m_r}(Y - C f; R).
double log_likelihood(const ObservationSet& obs, const Vector& f, CdfMethod method = CdfMethod::automatic);

// Dataset records, mirroring the JSON schema.
struct NumObs {
    std::vector<Index> indices;   // one index for a direct observation
    std::vector<double> weights;  // empty means all ones
    double value = 0.0;
};
struct ClassObs {
    Index index = 0;
    int label = 1;
};
struct PrefObs {
    Index winner = 0;
    Index loser = 0;
};
struct OrdinalObs {
    Index index = 0;
    int category = 1;
};
struct ValidObs {
    Index index = 0;
    bool valid = true;
    std::optional<double> value;
};
using Observation = std::variant<NumObs, ClassObs, PrefObs, OrdinalObs, ValidObs>;

struct Dataset {
    Matrix inputs;
    std::vector<Observation> observations;
    Vector ordinal_thresholds;   // needed when ordinal records are present
    double valid_threshold = 0.0;
};

/// Translates a dataset into canonical blocks. noise_sd is sigma_v for the
/// numeric, preference, ordinal and valid records (classification uses Sigma = I).
ObservationSet assemble(const Dataset& data, double noise_sd);

}  // namespace skewgp
