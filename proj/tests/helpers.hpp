#pragma once

#include <random>
#include <string>
#include <vector>

#include "emotta/adapter.hpp"
#include "emotta/gaussian.hpp"
#include "emotta/types.hpp"

namespace emotta::testing {

inline Vector gaussian_vector(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
    return v;
}

inline Vector random_unit(Eigen::Index d, std::mt19937_64& rng) {
    return l2_normalized(gaussian_vector(d, rng));
}

/// Random unit-norm prototypes (not necessarily orthogonal).
inline PrototypeSet random_prototypes(Eigen::Index d, Eigen::Index k, std::mt19937_64& rng) {
    PrototypeSet set;
    set.prototypes.resize(d, k);
    for (Eigen::Index y = 0; y < k; ++y) {
        set.prototypes.col(y) = random_unit(d, rng);
        set.class_names.push_back("class_" + std::to_string(y));
    }
    return set;
}

/// Mutually orthogonal unit prototypes (requires k <= d).
inline PrototypeSet orthonormal_prototypes(Eigen::Index d, Eigen::Index k,
                                           std::mt19937_64& rng) {
    PrototypeSet set;
    set.prototypes.resize(d, k);
    for (Eigen::Index y = 0; y < k; ++y) {
        Vector v;
        double norm = 0.0;
        do {
            v = gaussian_vector(d, rng);
            for (Eigen::Index j = 0; j < y; ++j) {
                v -= v.dot(set.prototypes.col(j)) * set.prototypes.col(j);
            }
            norm = v.norm();
        } while (norm < 1e-8);
        set.prototypes.col(y) = v / norm;
        set.class_names.push_back("class_" + std::to_string(y));
    }
    return set;
}

inline Vector random_simplex(Eigen::Index k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    Vector v(k);
    for (Eigen::Index i = 0; i < k; ++i) v[i] = uni(rng);
    return v / v.sum();
}

/// A random valid adapter state with an SPD covariance and an exact
/// explicitly-inverted precision cache.
inline AdapterState random_state(Eigen::Index d, Eigen::Index k, std::mt19937_64& rng,
                                 double epsilon = 1e-4) {
    AdapterState state;
    state.mu.resize(d, k);
    for (Eigen::Index y = 0; y < k; ++y) state.mu.col(y) = gaussian_vector(d, rng);

    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) a.row(i) = gaussian_vector(d, rng).transpose();
    state.sigma = a * a.transpose() / static_cast<double>(d);
    state.sigma.diagonal().array() += 0.1;
    state.sigma = (0.5 * (state.sigma + state.sigma.transpose())).eval();

    Matrix regularized = state.sigma;
    regularized.diagonal().array() += epsilon;
    state.precision = regularized.inverse();
    state.precision = (0.5 * (state.precision + state.precision.transpose())).eval();

    state.pi = random_simplex(k, rng);
    state.n_total = 1.0 + std::uniform_real_distribution<double>(0.0, 50.0)(rng);
    state.n_eff = state.pi * state.n_total;
    state.samples_seen = 10;
    state.epsilon = epsilon;
    return state;
}

}  // namespace emotta::testing
