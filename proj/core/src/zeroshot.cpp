#include "emotta/zeroshot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace emotta::zeroshot {

void ViewEnsembleConfig::validate() const {
    if (num_views < 1) throw InvalidArgumentError("num_views must be >= 1");
    if (keep_fraction <= 0.0 || keep_fraction > 1.0) {
        throw InvalidArgumentError("keep_fraction must be in (0, 1]");
    }
    if (view_noise_sigma < 0.0) {
        throw InvalidArgumentError("view_noise_sigma must be >= 0");
    }
}

Vector cosine_logits(const Embedding& embedding, const PrototypeSet& prototypes) {
    validate_dimensions(prototypes, embedding);
    const double x_norm = embedding.norm();
    if (x_norm < 1e-12) {
        throw InvalidArgumentError("cannot compute cosine similarity of a zero vector");
    }
    const Eigen::Index k = prototypes.num_classes();
    Vector logits(k);
    for (Eigen::Index y = 0; y < k; ++y) {
        const double p_norm = prototypes.prototypes.col(y).norm();
        logits[y] = embedding.dot(prototypes.prototypes.col(y)) / (x_norm * p_norm);
    }
    return logits;
}

Vector softmax_probs(const Vector& logits) {
    if (!logits.allFinite()) {
        throw InvalidArgumentError("softmax requires finite logits");
    }
    const double m = logits.maxCoeff();
    Vector p = (logits.array() - m).exp();
    return p / p.sum();
}

double entropy(const Vector& probs) {
    if (probs.size() == 0 || !probs.allFinite() || (probs.array() < -1e-12).any() ||
        std::abs(probs.sum() - 1.0) > 1e-6) {
        throw InvalidArgumentError("entropy input is not a probability simplex vector");
    }
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (p > 0.0) h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

Vector view_ensemble(const std::vector<Vector>& view_probs, const ViewEnsembleConfig& config) {
    config.validate();
    if (view_probs.empty()) {
        throw InvalidArgumentError("view_ensemble needs at least one view");
    }
    if (view_probs.size() != static_cast<std::size_t>(config.num_views)) {
        throw InvalidArgumentError("view count does not match config.num_views");
    }
    const int m = config.num_views;
    const int keep = std::max(1, static_cast<int>(std::ceil(config.keep_fraction * m)));

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> h(m);
    for (int i = 0; i < m; ++i) h[i] = entropy(view_probs[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return h[a] < h[b]; });

    Vector mean = Vector::Zero(view_probs[0].size());
    for (int i = 0; i < keep; ++i) mean += view_probs[order[i]];
    return mean / mean.sum();
}

std::vector<Embedding> make_views(const Embedding& embedding, const ViewEnsembleConfig& config,
                                  std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<Embedding> views;
    views.reserve(config.num_views);
    views.push_back(embedding);
    for (int m = 1; m < config.num_views; ++m) {
        if (config.view_noise_sigma == 0.0) {
            views.push_back(embedding);
            continue;
        }
        Embedding v = embedding;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v[i] += config.view_noise_sigma * noise(rng);
        }
        views.push_back(l2_normalized(v));
    }
    return views;
}

}  // namespace emotta::zeroshot
