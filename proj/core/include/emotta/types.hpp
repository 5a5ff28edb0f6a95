#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "emotta/errors.hpp"

namespace emotta {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A d-dimensional embedding vector, the unit of streamed input.
using Embedding = Eigen::VectorXd;

/// Returns true iff every entry is finite.
bool is_finite(const Vector& v);
bool is_finite(const Matrix& m);

/// L2-normalizes a vector. Throws InvalidArgumentError on (near-)zero norm
/// or non-finite entries.
Vector l2_normalized(const Vector& v);

/// K class prototype vectors used for zero-shot logits and mean initialization.
/// Prototypes are stored column-wise: prototypes.col(y) is class y.
struct PrototypeSet {
    Matrix prototypes;                     // d x K
    std::vector<std::string> class_names;  // size K

    Eigen::Index dim() const { return prototypes.rows(); }
    Eigen::Index num_classes() const { return prototypes.cols(); }

    /// Checks K >= 2, finite entries, name count. Throws InvalidPrototypeSetError.
    void validate() const;

    /// Normalizes every prototype in place (ingestion rule).
    void normalize();
};

enum class CovarianceRule {
    kLiteral,  // Sigma' = Sigma + (w / max(n'-1, 1)) * S
    kConvex,   // Sigma' = (n * Sigma + w * S) / n'
};

struct HyperParams {
    double alpha = 0.2;             // fusion coefficient
    double beta = 4.5;              // entropy sharpness
    double epsilon = 1e-4;          // covariance ridge, added before factorization
    bool mean_update = true;
    bool cov_update = true;
    bool alm_prior_weighting = true;  // when off, w == 1
    bool use_prior_in_prediction = true;
    CovarianceRule covariance_rule = CovarianceRule::kConvex;
    std::uint64_t refactor_period = 256;
    bool normalize_embeddings = true;

    /// Throws InvalidArgumentError if any constraint is violated.
    void validate() const;
};

/// The evolving EM parameters.
struct AdapterState {
    Matrix mu;         // d x K, class means, column per class
    Matrix sigma;      // d x d, shared covariance
    Matrix precision;  // d x d, cached (sigma + epsilon*I)^-1
    Vector pi;         // K, class priors
    Vector n_eff;      // K, effective class counts
    double n_total = 0.0;          // weighted sample count
    std::uint64_t samples_seen = 0;  // raw sample count
    double epsilon = 1e-4;           // ridge the precision cache was built with

    // Max-abs deviation of the incrementally maintained cache from the freshly
    // computed inverse, measured at the most recent full refactorization.
    double last_refactor_drift = 0.0;

    Eigen::Index dim() const { return mu.rows(); }
    Eigen::Index num_classes() const { return mu.cols(); }

    /// Checks the type invariants (prior simplex, count bookkeeping,
    /// covariance symmetry). Throws InvalidArgumentError on violation.
    void validate() const;
};

/// Per-sample record produced by the adapter pipeline.
struct PredictionOutcome {
    Vector zero_shot_probs;    // K-simplex
    double entropy = 0.0;      // H in [0, ln K]
    double weight = 1.0;       // w(H) in (0, 1]
    Vector responsibilities;   // K-simplex, E-step gammas
    Vector fused_logits;       // K
    Vector gda_log_posterior;  // K, log of responsibilities
    int predicted_class = 0;
};

/// Succeeds iff the embedding length equals the prototype dimension d.
void validate_dimensions(const PrototypeSet& prototypes, const Embedding& embedding);

/// argmax with ties broken by lowest index.
int argmax_index(const Vector& v);

}  // namespace emotta
