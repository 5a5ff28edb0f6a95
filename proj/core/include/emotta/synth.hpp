#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "emotta/types.hpp"

namespace emotta::synth {

/// Parameters of a synthetic domain-shift stream.
struct ShiftSpec {
    int num_classes = 4;
    int dim = 16;
    int samples_per_stream = 2000;
    double shift_magnitude = 1.0;    // ||delta||, measured before renormalization
    double within_class_sigma = 0.5; // per-coordinate std of class noise
    Vector class_prior;              // stream label frequencies; empty = uniform
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    PrototypeSet prototypes;
    std::vector<Embedding> stream;
    std::vector<int> labels;
    Matrix true_means;  // d x K
};

/// Deterministic given the seed. Prototypes are random orthonormal unit
/// vectors; true means are shifted prototypes, renormalized; samples are
/// Gaussian around their class mean, then normalized when requested.
SyntheticData generate(const ShiftSpec& spec, bool normalize = true);

struct BatchEstimate {
    Matrix mu;  // d x K
    Vector pi;  // K
};

/// Closed-form batch accumulation of the weighted mean/prior updates from a
/// recorded (w_t, gamma_t) trace; the independent oracle for the streamed
/// recursion.
BatchEstimate batch_gda_oracle(const std::vector<Embedding>& xs,
                               const std::vector<std::pair<double, Vector>>& weights,
                               const AdapterState& init);

/// Labeled GDA fit: class means, pooled within-class covariance (divisor
/// n - K), label-frequency priors. The accuracy ceiling in reports.
AdapterState supervised_gda_upper_bound(const std::vector<Embedding>& xs,
                                        const std::vector<int>& labels, double epsilon);

}  // namespace emotta::synth
