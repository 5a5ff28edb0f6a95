#include "emotta/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace emotta::gaussian {

CovarianceFactor factorize(const Matrix& sigma, double epsilon) {
    if (sigma.rows() != sigma.cols()) {
        throw InvalidArgumentError("covariance must be square");
    }
    if (!sigma.allFinite()) {
        throw InvalidArgumentError("covariance contains non-finite entries");
    }
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw InvalidArgumentError("covariance is not symmetric within 1e-9");
    }
    if (epsilon < 0.0) {
        throw InvalidArgumentError("ridge epsilon must be >= 0");
    }

    Matrix regularized = sigma;
    regularized.diagonal().array() += epsilon;

    Eigen::LLT<Matrix> llt(regularized);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError(
            "covariance + ridge is not positive definite (Cholesky pivot <= 0)");
    }

    CovarianceFactor factor;
    factor.lower = llt.matrixL();
    factor.log_det = 2.0 * factor.lower.diagonal().array().log().sum();
    if (!std::isfinite(factor.log_det) ||
        (factor.lower.diagonal().array() <= 0.0).any()) {
        throw NotPositiveDefiniteError("covariance + ridge has a non-positive pivot");
    }
    return factor;
}

double mahalanobis_sq(const Vector& x, const Vector& mu, const CovarianceFactor& factor) {
    if (x.size() != factor.dim() || mu.size() != factor.dim()) {
        throw DimensionMismatchError(factor.dim(),
                                     x.size() != factor.dim() ? x.size() : mu.size());
    }
    // L z = (x - mu)  =>  quadratic form is ||z||^2
    Vector z = factor.lower.triangularView<Eigen::Lower>().solve(x - mu);
    return z.squaredNorm();
}

double log_gaussian_density(const Vector& x, const Vector& mu, const CovarianceFactor& factor) {
    const double d = static_cast<double>(factor.dim());
    return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * factor.log_det -
           0.5 * mahalanobis_sq(x, mu, factor);
}

Vector gda_log_scores(const Vector& x, const AdapterState& state, bool use_prior) {
    if (x.size() != state.dim()) {
        throw DimensionMismatchError(state.dim(), x.size());
    }
    const Eigen::Index k = state.num_classes();
    // P x once, then (x - mu)^T P (x - mu) = x.Px - 2 mu.Px + mu.Pmu
    Vector px = state.precision.selfadjointView<Eigen::Lower>() * x;
    const double x_px = x.dot(px);
    Vector scores(k);
    for (Eigen::Index y = 0; y < k; ++y) {
        const auto mu_y = state.mu.col(y);
        Vector pmu = state.precision.selfadjointView<Eigen::Lower>() * mu_y;
        const double maha = x_px - 2.0 * mu_y.dot(px) + mu_y.dot(pmu);
        scores[y] = -0.5 * maha;
        if (use_prior) scores[y] += std::log(state.pi[y]);
    }
    return scores;
}

Vector gda_posterior(const Vector& x, const AdapterState& state) {
    Vector scores = gda_log_scores(x, state, /*use_prior=*/true);
    const double m = scores.maxCoeff();
    Vector g = (scores.array() - m).exp();
    return g / g.sum();
}

int gda_predict(const Vector& x, const AdapterState& state, bool use_prior) {
    return argmax_index(gda_log_scores(x, state, use_prior));
}

}  // namespace emotta::gaussian
