#include "emotta/types.hpp"

#include <cmath>

namespace emotta {

bool is_finite(const Vector& v) { return v.allFinite(); }
bool is_finite(const Matrix& m) { return m.allFinite(); }

Vector l2_normalized(const Vector& v) {
    if (!v.allFinite()) {
        throw InvalidArgumentError("cannot normalize vector with non-finite entries");
    }
    const double norm = v.norm();
    if (norm < 1e-12) {
        throw InvalidArgumentError("cannot normalize (near-)zero vector");
    }
    return v / norm;
}

void PrototypeSet::validate() const {
    if (num_classes() < 2) {
        throw InvalidPrototypeSetError(
            "prototype set needs K >= 2 classes, got " + std::to_string(num_classes()));
    }
    if (dim() < 1) {
        throw InvalidPrototypeSetError("prototype dimension must be >= 1");
    }
    if (!prototypes.allFinite()) {
        throw InvalidPrototypeSetError("prototypes contain non-finite entries");
    }
    if (!class_names.empty() &&
        class_names.size() != static_cast<std::size_t>(num_classes())) {
        throw InvalidPrototypeSetError(
            "class name count (" + std::to_string(class_names.size()) +
            ") does not match K (" + std::to_string(num_classes()) + ")");
    }
}

void PrototypeSet::normalize() {
    for (Eigen::Index y = 0; y < num_classes(); ++y) {
        prototypes.col(y) = l2_normalized(prototypes.col(y));
    }
}

void HyperParams::validate() const {
    if (alpha < 0.0) throw InvalidArgumentError("alpha must be >= 0");
    if (beta < 0.0) throw InvalidArgumentError("beta must be >= 0");
    if (epsilon <= 0.0) throw InvalidArgumentError("epsilon must be > 0");
    if (refactor_period < 1) throw InvalidArgumentError("refactor_period must be >= 1");
}

void AdapterState::validate() const {
    if (!mu.allFinite() || !sigma.allFinite() || !pi.allFinite() || !n_eff.allFinite()) {
        throw InvalidArgumentError("adapter state contains non-finite entries");
    }
    if (std::abs(pi.sum() - 1.0) > 1e-9) {
        throw InvalidArgumentError("class priors must sum to 1");
    }
    if ((pi.array() <= 0.0).any()) {
        throw InvalidArgumentError("every class prior must be > 0");
    }
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym >= 1e-9) {
        throw InvalidArgumentError("covariance is not symmetric");
    }
    if (std::abs(n_eff.sum() - n_total) > 1e-9) {
        throw InvalidArgumentError("effective counts do not sum to the weighted total");
    }
}

void validate_dimensions(const PrototypeSet& prototypes, const Embedding& embedding) {
    prototypes.validate();
    if (embedding.size() != prototypes.dim()) {
        throw DimensionMismatchError(prototypes.dim(), embedding.size());
    }
}

int argmax_index(const Vector& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace emotta
