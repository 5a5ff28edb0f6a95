#include "emotta/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "emotta/gaussian.hpp"

namespace emotta::synth {

namespace {

Vector gaussian_vector(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
    return v;
}

}  // namespace

void ShiftSpec::validate() const {
    if (num_classes < 2) throw InvalidArgumentError("num_classes must be >= 2");
    if (dim < 1) throw InvalidArgumentError("dim must be >= 1");
    if (num_classes > dim) {
        throw InvalidArgumentError(
            "infeasible spec: cannot draw " + std::to_string(num_classes) +
            " orthonormal prototypes in dimension " + std::to_string(dim));
    }
    if (samples_per_stream < 1) throw InvalidArgumentError("samples_per_stream must be >= 1");
    if (shift_magnitude < 0.0) throw InvalidArgumentError("shift_magnitude must be >= 0");
    if (within_class_sigma <= 0.0) throw InvalidArgumentError("within_class_sigma must be > 0");
    if (class_prior.size() != 0) {
        if (class_prior.size() != num_classes) {
            throw DimensionMismatchError(num_classes, class_prior.size());
        }
        if ((class_prior.array() < 0.0).any() || std::abs(class_prior.sum() - 1.0) > 1e-9) {
            throw InvalidArgumentError("class_prior is not on the simplex");
        }
    }
}

SyntheticData generate(const ShiftSpec& spec, bool normalize) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const Eigen::Index d = spec.dim;
    const Eigen::Index k = spec.num_classes;

    // Random orthonormal prototypes via Gram-Schmidt on Gaussian draws.
    Matrix protos(d, k);
    for (Eigen::Index y = 0; y < k; ++y) {
        Vector v;
        double norm = 0.0;
        do {
            v = gaussian_vector(d, rng);
            for (Eigen::Index j = 0; j < y; ++j) {
                v -= v.dot(protos.col(j)) * protos.col(j);
            }
            norm = v.norm();
        } while (norm < 1e-8);
        protos.col(y) = v / norm;
    }

    SyntheticData data;
    data.prototypes.prototypes = protos;
    for (Eigen::Index y = 0; y < k; ++y) {
        data.prototypes.class_names.push_back("class_" + std::to_string(y));
    }

    // Domain shift is modeled as a coherent translation: one seeded direction
    // shared by all classes, matching the premise that the whole embedding
    // distribution moved at test time. The direction is drawn inside the
    // prototype span so the shift actually interferes with the zero-shot
    // anchors instead of landing in inert orthogonal dimensions.
    Vector delta = Vector::Zero(d);
    if (spec.shift_magnitude > 0.0) {
        delta = protos * gaussian_vector(k, rng);
        delta = spec.shift_magnitude * l2_normalized(delta);
    }
    data.true_means.resize(d, k);
    for (Eigen::Index y = 0; y < k; ++y) {
        data.true_means.col(y) = l2_normalized(protos.col(y) + delta);
    }

    Vector prior = spec.class_prior.size() == 0
                       ? Vector::Constant(k, 1.0 / static_cast<double>(k))
                       : spec.class_prior;
    std::discrete_distribution<int> label_dist(prior.data(), prior.data() + prior.size());
    std::normal_distribution<double> noise(0.0, spec.within_class_sigma);

    data.stream.reserve(spec.samples_per_stream);
    data.labels.reserve(spec.samples_per_stream);
    for (int t = 0; t < spec.samples_per_stream; ++t) {
        const int y = label_dist(rng);
        Vector x = data.true_means.col(y);
        for (Eigen::Index i = 0; i < d; ++i) x[i] += noise(rng);
        data.labels.push_back(y);
        data.stream.push_back(normalize ? l2_normalized(x) : x);
    }
    return data;
}

BatchEstimate batch_gda_oracle(const std::vector<Embedding>& xs,
                               const std::vector<std::pair<double, Vector>>& weights,
                               const AdapterState& init) {
    if (xs.size() != weights.size()) {
        throw InvalidArgumentError("sample and weight trace lengths differ");
    }
    const Eigen::Index k = init.num_classes();

    Matrix numer = init.mu * init.n_eff.asDiagonal();  // N_y^0 * mu_y^0 per column
    Vector denom = init.n_eff;
    double n_total = init.n_total;

    for (std::size_t t = 0; t < xs.size(); ++t) {
        const double w = weights[t].first;
        const Vector& gamma = weights[t].second;
        if (gamma.size() != k) throw DimensionMismatchError(k, gamma.size());
        for (Eigen::Index y = 0; y < k; ++y) {
            numer.col(y) += w * gamma[y] * xs[t];
        }
        denom += w * gamma;
        n_total += w;
    }

    BatchEstimate est;
    est.mu = numer * denom.cwiseInverse().asDiagonal();
    est.pi = denom / n_total;
    return est;
}

AdapterState supervised_gda_upper_bound(const std::vector<Embedding>& xs,
                                        const std::vector<int>& labels, double epsilon) {
    if (xs.empty() || xs.size() != labels.size()) {
        throw InvalidArgumentError("need matching, non-empty samples and labels");
    }
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    const Eigen::Index d = xs[0].size();

    std::vector<int> counts(k, 0);
    Matrix mu = Matrix::Zero(d, k);
    for (std::size_t t = 0; t < xs.size(); ++t) {
        const int y = labels[t];
        if (y < 0) throw InvalidArgumentError("negative class label");
        counts[y] += 1;
        mu.col(y) += xs[t];
    }
    for (int y = 0; y < k; ++y) {
        if (counts[y] < 2) {
            throw InvalidArgumentError("class " + std::to_string(y) +
                                       " needs at least two samples");
        }
        mu.col(y) /= static_cast<double>(counts[y]);
    }

    Matrix sigma = Matrix::Zero(d, d);
    for (std::size_t t = 0; t < xs.size(); ++t) {
        Vector u = xs[t] - mu.col(labels[t]);
        sigma.noalias() += u * u.transpose();
    }
    sigma /= static_cast<double>(xs.size() - k);

    AdapterState state;
    state.mu = mu;
    state.sigma = sigma;
    state.epsilon = epsilon;
    state.pi.resize(k);
    state.n_eff.resize(k);
    for (int y = 0; y < k; ++y) {
        state.pi[y] = static_cast<double>(counts[y]) / static_cast<double>(xs.size());
        state.n_eff[y] = static_cast<double>(counts[y]);
    }
    state.n_total = static_cast<double>(xs.size());
    state.samples_seen = xs.size();

    const auto factor = gaussian::factorize(sigma, epsilon);
    Matrix inv = factor.lower.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
    inv = factor.lower.transpose().triangularView<Eigen::Upper>().solve(inv);
    state.precision = 0.5 * (inv + inv.transpose());
    return state;
}

}  // namespace emotta::synth
