#pragma once

#include "emotta/types.hpp"

namespace emotta::gaussian {

/// Lower-triangular Cholesky factor L of (Sigma + epsilon*I), with
/// log_det = 2 * sum ln L_ii.
struct CovarianceFactor {
    Matrix lower;    // d x d
    double log_det = 0.0;

    Eigen::Index dim() const { return lower.rows(); }
};

/// Factorizes sigma + epsilon*I. Throws NotPositiveDefiniteError if any pivot
/// is <= 0 and InvalidArgumentError if sigma is not symmetric within 1e-9.
CovarianceFactor factorize(const Matrix& sigma, double epsilon);

/// (x - mu)^T (Sigma + eps*I)^-1 (x - mu) via one triangular solve.
double mahalanobis_sq(const Vector& x, const Vector& mu, const CovarianceFactor& factor);

/// Log of the multivariate normal density N(x | mu, Sigma + eps*I).
double log_gaussian_density(const Vector& x, const Vector& mu, const CovarianceFactor& factor);

/// E-step responsibilities gamma_y ∝ pi_y * N(x | mu_y, Sigma + eps*I),
/// computed in log-space through the state's precision cache.
Vector gda_posterior(const Vector& x, const AdapterState& state);

/// Per-class unnormalized log posterior scores (shared terms dropped):
/// ln pi_y - 0.5 * mahalanobis_sq. Used by gda_posterior and gda_predict.
Vector gda_log_scores(const Vector& x, const AdapterState& state, bool use_prior);

/// argmax_y [ (use_prior ? ln pi_y : 0) - 0.5 * mahalanobis ]; ties broken by
/// lowest class index.
int gda_predict(const Vector& x, const AdapterState& state, bool use_prior);

}  // namespace emotta::gaussian
