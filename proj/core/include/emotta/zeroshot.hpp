#pragma once

#include <cstdint>
#include <vector>

#include "emotta/types.hpp"

namespace emotta::zeroshot {

/// Configuration of the entropy-filtered view-ensemble baseline.
struct ViewEnsembleConfig {
    int num_views = 8;              // M
    double keep_fraction = 0.5;     // rho in (0, 1]
    double view_noise_sigma = 0.05; // std of the isotropic embedding perturbation

    void validate() const;
};

/// Cosine similarity of the embedding with each prototype; entries in [-1, 1].
Vector cosine_logits(const Embedding& embedding, const PrototypeSet& prototypes);

/// Numerically stable (max-subtracted) softmax.
Vector softmax_probs(const Vector& logits);

/// Shannon entropy -sum p ln p with 0 ln 0 := 0. Rejects inputs off the
/// simplex by more than 1e-6.
double entropy(const Vector& probs);

/// Selects the ceil(rho*M) lowest-entropy views and returns their mean,
/// renormalized to the simplex.
Vector view_ensemble(const std::vector<Vector>& view_probs, const ViewEnsembleConfig& config);

/// View 1 is the unperturbed embedding; views 2..M add isotropic Gaussian
/// noise and renormalize. Deterministic given the seed.
std::vector<Embedding> make_views(const Embedding& embedding, const ViewEnsembleConfig& config,
                                  std::uint64_t seed);

}  // namespace emotta::zeroshot
