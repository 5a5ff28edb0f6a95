#pragma once

#include <cstdint>
#include <vector>

#include "emotta/types.hpp"

namespace emotta::adapter {

/// Observability record for one processed sample.
struct StepTrace {
    std::uint64_t sample_index = 0;
    PredictionOutcome outcome;
    Vector mu_drift;          // ||mu_y' - mu_y|| per class
    double n_total_after = 0.0;
};

/// Builds the initial state: mu_y = prototype_y, Sigma = I, pi_y = 1/K,
/// N_y = 1/K, n_total = 1, with the precision cache factorized.
AdapterState init(const PrototypeSet& prototypes, const HyperParams& hyper);

/// w(h) = exp(-beta * h).
double confidence_weight(double h, double beta);

/// One confidence-weighted M-step. Updates means, shared covariance,
/// priors, effective counts and the precision cache in place. w = 0 is a
/// no-op apart from samples_seen.
void m_step(AdapterState& state, const Embedding& x, const Vector& gamma, double w,
            const HyperParams& hyper);

/// logit_y = T_y^T x + alpha * (w_y^T x + b_y) with w_y = P mu_y and
/// b_y = ln pi_y - 0.5 mu_y^T P mu_y (P the cached precision). With
/// use_prior off, ln pi_y is replaced by the uniform ln(1/K).
Vector fuse_logits(const Embedding& x, const PrototypeSet& prototypes,
                   const AdapterState& state, double alpha, bool use_prior = true);

/// Full per-sample pipeline: zero-shot probabilities, entropy, confidence
/// weight, responsibilities and fused prediction on the pre-update state,
/// then the M-step. The prediction never sees statistics influenced by its
/// own sample.
PredictionOutcome process_sample(AdapterState& state, const Embedding& x,
                                 const PrototypeSet& prototypes, const HyperParams& hyper,
                                 StepTrace* trace = nullptr);

/// Folds process_sample over the stream in order.
std::vector<StepTrace> run_stream(AdapterState& state, const std::vector<Embedding>& stream,
                                  const PrototypeSet& prototypes, const HyperParams& hyper);

}  // namespace emotta::adapter
