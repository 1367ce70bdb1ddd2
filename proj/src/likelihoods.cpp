#include "skewgp/likelihoods.hpp"

#include <cmath>
#include <iostream>

namespace skewgp {

namespace {

void check_index(Index i, Index n, const char* what) {
    if (i < 0 || i >= n) throw InputError(std::string(what) + ": input index out of range");
}

double checked_noise(double noise_sd, const char* what) {
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd))
        throw InputError(std::string(what) + ": noise standard deviation must be positive");
    return noise_sd;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

ObservationSet probit_only(const Matrix& x, Vector z, Matrix w, Matrix sigma) {
    ObservationSet out = ObservationSet::none(x);
    out.probit.z = std::move(z);
    out.probit.w = std::move(w);
    out.probit.sigma = std::move(sigma);
    return out;
}

}  // namespace

ObservationSet ObservationSet::none(const Matrix& inputs) {
    ObservationSet s;
    s.inputs = inputs;
    const Index n = inputs.rows();
    s.numeric.y = Vector(0);
    s.numeric.c = Matrix(0, n);
    s.numeric.r = Matrix(0, 0);
    s.probit.z = Vector(0);
    s.probit.w = Matrix(0, n);
    s.probit.sigma = Matrix(0, 0);
    return s;
}

void ObservationSet::validate() const {
    const Index nn = n();
    if (numeric.c.cols() != nn || numeric.c.rows() != numeric.size() || numeric.r.rows() != numeric.size() ||
        numeric.r.cols() != numeric.size())
        throw InputError("observations: numeric block sizes are inconsistent");
    if (probit.w.cols() != nn || probit.w.rows() != probit.size() || probit.sigma.rows() != probit.size() ||
        probit.sigma.cols() != probit.size())
        throw InputError("observations: probit block sizes are inconsistent");
    if (!numeric.y.allFinite() || !numeric.c.allFinite() || !numeric.r.allFinite() || !probit.z.allFinite() ||
        !probit.w.allFinite() || !probit.sigma.allFinite() || !inputs.allFinite())
        throw InputError("observations: entries must be finite");
    if (has_numeric()) robust_cholesky(numeric.r, -1.0, "numeric noise covariance R");
    if (has_probit()) robust_cholesky(probit.sigma, -1.0, "probit covariance Sigma");
}

void OrdinalSpec::validate() const {
    if (thresholds.size() < 1) throw InputError("ordinal: need at least one threshold (r >= 2)");
    for (Index i = 1; i < thresholds.size(); ++i)
        if (!(thresholds(i) > thresholds(i - 1))) throw InputError("ordinal: thresholds must be strictly increasing");
    if (!thresholds.allFinite()) throw InputError("ordinal: thresholds must be finite");
    checked_noise(noise, "ordinal");
}

ObservationSet numeric_block(const Matrix& x, const std::vector<LinearObservation>& obs, double noise_sd) {
    const Index n = x.rows();
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
        throw InputError("numeric_block: noise standard deviation must be >= 0");
    double var = noise_sd * noise_sd;
    if (var == 0.0) {
        std::clog << "skewgp: warning: zero numeric noise replaced by a noise variance of 1e-6\n";
        var = 1e-6;
    }
    ObservationSet out = ObservationSet::none(x);
    const Index m = static_cast<Index>(obs.size());
    out.numeric.y.resize(m);
    out.numeric.c.resize(m, n);
    for (Index i = 0; i < m; ++i) {
        const auto& o = obs[static_cast<std::size_t>(i)];
        if (o.c.size() != n) throw InputError("numeric_block: selector length must equal the number of inputs");
        out.numeric.c.row(i) = o.c.transpose();
        out.numeric.y(i) = o.y;
    }
    out.numeric.r = var * Matrix::Identity(m, m);
    return out;
}

ObservationSet numeric_block(const Matrix& x, const std::vector<Index>& index, const Vector& y, double noise_sd) {
    if (static_cast<Index>(index.size()) != y.size()) throw InputError("numeric_block: one value per index");
    std::vector<LinearObservation> obs;
    for (std::size_t i = 0; i < index.size(); ++i) {
        check_index(index[i], x.rows(), "numeric_block");
        LinearObservation o;
        o.c = Vector::Unit(x.rows(), index[i]);
        o.y = y(static_cast<Index>(i));
        obs.push_back(std::move(o));
    }
    return numeric_block(x, obs, noise_sd);
}

ObservationSet classification_block(const Matrix& x, const std::vector<Index>& index, const Vector& labels) {
    if (static_cast<Index>(index.size()) != labels.size()) throw InputError("classification_block: one label per index");
    const Index m = labels.size();
    const bool zero_one = ((labels.array() == 0.0) || (labels.array() == 1.0)).all();
    const bool signed_labels = ((labels.array() == -1.0) || (labels.array() == 1.0)).all();
    if (!zero_one && !signed_labels) throw InputError("classification_block: labels must be in {-1,+1} or {0,1}");
    Matrix w = Matrix::Zero(m, x.rows());
    for (Index i = 0; i < m; ++i) {
        check_index(index[static_cast<std::size_t>(i)], x.rows(), "classification_block");
        const double sign = zero_one ? 2.0 * labels(i) - 1.0 : labels(i);
        w(i, index[static_cast<std::size_t>(i)]) = sign;
    }
    return probit_only(x, Vector::Zero(m), std::move(w), Matrix::Identity(m, m));
}

ObservationSet classification_block(const Matrix& x, const Vector& labels) {
    if (labels.size() != x.rows()) throw InputError("classification_block: one label per input row");
    std::vector<Index> index(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) index[static_cast<std::size_t>(i)] = i;
    return classification_block(x, index, labels);
}

ObservationSet preference_block(const Matrix& x, const std::vector<std::pair<Index, Index>>& duels, double noise_sd) {
    const double sd = checked_noise(noise_sd, "preference_block");
    const Index m = static_cast<Index>(duels.size());
    Matrix w = Matrix::Zero(m, x.rows());
    for (Index i = 0; i < m; ++i) {
        const auto [win, lose] = duels[static_cast<std::size_t>(i)];
        check_index(win, x.rows(), "preference_block");
        check_index(lose, x.rows(), "preference_block");
        if (win == lose) throw InputError("preference_block: a point cannot duel itself");
        w(i, win) = 1.0 / sd;
        w(i, lose) = -1.0 / sd;
    }
    return probit_only(x, Vector::Zero(m), std::move(w), Matrix::Identity(m, m));
}

ObservationSet ordinal_block(const Matrix& x, const std::vector<Index>& index, const std::vector<int>& category,
                             const OrdinalSpec& spec) {
    spec.validate();
    if (index.size() != category.size()) throw InputError("ordinal_block: one category per index");
    const int r = spec.categories();
    const double sd = spec.noise;
    const Vector& b = spec.thresholds;
    std::vector<double> z;
    std::vector<std::pair<Index, double>> w;  // (column, coefficient) per row
    std::vector<bool> paired;                 // row starts an interior pair
    for (std::size_t i = 0; i < index.size(); ++i) {
        check_index(index[i], x.rows(), "ordinal_block");
        const int y = category[i];
        if (y < 1 || y > r) throw InputError("ordinal_block: category out of range");
        if (y < r) {  // f + v <= b_y
            z.push_back(b(y - 1) / sd);
            w.emplace_back(index[i], -1.0 / sd);
            paired.push_back(y > 1);
        }
        if (y > 1) {  // f + v > b_{y-1}
            z.push_back(-b(y - 2) / sd);
            w.emplace_back(index[i], 1.0 / sd);
            paired.push_back(false);
        }
    }
    const Index m = static_cast<Index>(z.size());
    Matrix wm = Matrix::Zero(m, x.rows());
    Matrix sigma = Matrix::Identity(m, m);
    Vector zv(m);
    for (Index i = 0; i < m; ++i) {
        zv(i) = z[static_cast<std::size_t>(i)];
        wm(i, w[static_cast<std::size_t>(i)].first) = w[static_cast<std::size_t>(i)].second;
        if (paired[static_cast<std::size_t>(i)]) sigma(i, i + 1) = sigma(i + 1, i) = kOrdinalPairCorrelation;
    }
    return probit_only(x, std::move(zv), std::move(wm), std::move(sigma));
}

ObservationSet valid_invalid_block(const Matrix& x, const std::vector<ValidOutcome>& outcomes, double threshold,
                                   double noise_sd) {
    const double sd = checked_noise(noise_sd, "valid_invalid_block");
    if (!std::isfinite(threshold)) throw InputError("valid_invalid_block: threshold must be finite");
    std::vector<Index> num_index;
    std::vector<double> num_value;
    const Index m = static_cast<Index>(outcomes.size());
    Matrix w = Matrix::Zero(m, x.rows());
    Vector z(m);
    for (Index i = 0; i < m; ++i) {
        const ValidOutcome& o = outcomes[static_cast<std::size_t>(i)];
        check_index(o.index, x.rows(), "valid_invalid_block");
        if (o.valid) {
            if (!o.value) throw InputError("valid_invalid_block: valid outcome needs a value");
            num_index.push_back(o.index);
            num_value.push_back(*o.value);
            z(i) = -threshold / sd;
            w(i, o.index) = 1.0 / sd;
        } else {
            if (o.value) throw InputError("valid_invalid_block: invalid outcome must not carry a value");
            z(i) = threshold / sd;
            w(i, o.index) = -1.0 / sd;
        }
    }
    ObservationSet probit = probit_only(x, z, w, Matrix::Identity(m, m));
    if (num_index.empty()) return probit;
    const Vector y = Eigen::Map<const Vector>(num_value.data(), static_cast<Index>(num_value.size()));
    return merge(numeric_block(x, num_index, y, sd), probit);
}

ObservationSet merge(const ObservationSet& a, const ObservationSet& b) {
    if (a.inputs.rows() != b.inputs.rows() || a.inputs.cols() != b.inputs.cols() || a.inputs != b.inputs)
        throw InputError("merge: observation sets refer to different inputs");
    ObservationSet out = ObservationSet::none(a.inputs);
    const Index n = a.n();
    out.numeric.y.resize(a.numeric.size() + b.numeric.size());
    out.numeric.y << a.numeric.y, b.numeric.y;
    out.numeric.c.resize(out.numeric.y.size(), n);
    out.numeric.c << a.numeric.c, b.numeric.c;
    out.numeric.r = block_diag(a.numeric.r, b.numeric.r);
    out.probit.z.resize(a.probit.size() + b.probit.size());
    out.probit.z << a.probit.z, b.probit.z;
    out.probit.w.resize(out.probit.z.size(), n);
    out.probit.w << a.probit.w, b.probit.w;
    out.probit.sigma = block_diag(a.probit.sigma, b.probit.sigma);
    return out;
}

ObservationSet merge(const std::vector<ObservationSet>& sets) {
    if (sets.empty()) throw InputError("merge: nothing to merge");
    ObservationSet out = sets.front();
    for (std::size_t i = 1; i < sets.size(); ++i) out = merge(out, sets[i]);
    return out;
}

double log_likelihood(const ObservationSet& obs, const Vector& f, CdfMethod method) {
    if (f.size() != obs.n()) throw InputError("log_likelihood: f must have one entry per input");
    double out = 0.0;
    if (obs.has_numeric()) {
        const CholeskyResult chol = robust_cholesky(obs.numeric.r, -1.0, "numeric noise covariance R");
        const Vector w = chol.llt.matrixL().solve(obs.numeric.y - obs.numeric.c * f);
        out += -0.5 * w.squaredNorm() - chol.llt.matrixLLT().diagonal().array().log().sum() -
               0.5 * static_cast<double>(w.size()) * kLogTwoPi;
    }
    if (obs.has_probit()) {
        CdfRequest req;
        req.upper = obs.probit.z + obs.probit.w * f;
        req.cov = obs.probit.sigma;
        req.method = method;
        req.check_points = 0;
        out += mvn_cdf(req).log_probability;
    }
    return out;
}

ObservationSet assemble(const Dataset& data, double noise_sd) {
    const Matrix& x = data.inputs;
    const Index n = x.rows();
    std::vector<LinearObservation> num;
    std::vector<Index> cls_index;
    std::vector<double> cls_label;
    std::vector<std::pair<Index, Index>> duels;
    std::vector<Index> ord_index;
    std::vector<int> ord_cat;
    std::vector<ValidOutcome> valid;
    for (const Observation& o : data.observations) {
        if (const auto* v = std::get_if<NumObs>(&o)) {
            if (v->indices.empty()) throw InputError("dataset: numeric record without indices");
            if (!v->weights.empty() && v->weights.size() != v->indices.size())
                throw InputError("dataset: numeric weights must match indices");
            LinearObservation lo;
            lo.c = Vector::Zero(n);
            for (std::size_t k = 0; k < v->indices.size(); ++k) {
                check_index(v->indices[k], n, "dataset");
                lo.c(v->indices[k]) += v->weights.empty() ? 1.0 : v->weights[k];
            }
            lo.y = v->value;
            num.push_back(std::move(lo));
        } else if (const auto* c = std::get_if<ClassObs>(&o)) {
            cls_index.push_back(c->index);
            cls_label.push_back(c->label == 0 ? -1.0 : static_cast<double>(c->label));
            if (c->label != 0 && c->label != 1 && c->label != -1) throw InputError("dataset: class label must be -1, 0 or 1");
        } else if (const auto* p = std::get_if<PrefObs>(&o)) {
            duels.emplace_back(p->winner, p->loser);
        } else if (const auto* d = std::get_if<OrdinalObs>(&o)) {
            ord_index.push_back(d->index);
            ord_cat.push_back(d->category);
        } else if (const auto* u = std::get_if<ValidObs>(&o)) {
            valid.push_back({u->index, u->valid, u->value});
        }
    }
    std::vector<ObservationSet> parts{ObservationSet::none(x)};
    if (!num.empty()) parts.push_back(numeric_block(x, num, noise_sd));
    if (!cls_index.empty()) {
        const Vector labels = Eigen::Map<const Vector>(cls_label.data(), static_cast<Index>(cls_label.size()));
        parts.push_back(classification_block(x, cls_index, labels));
    }
    if (!duels.empty()) parts.push_back(preference_block(x, duels, noise_sd));
    if (!ord_index.empty()) {
        OrdinalSpec spec;
        spec.thresholds = data.ordinal_thresholds;
        spec.noise = noise_sd;
        parts.push_back(ordinal_block(x, ord_index, ord_cat, spec));
    }
    if (!valid.empty()) parts.push_back(valid_invalid_block(x, valid, data.valid_threshold, noise_sd));
    ObservationSet out = merge(parts);
    if (out.empty()) throw InputError("dataset: no observations");
    return out;
}

}  // namespace skewgp
