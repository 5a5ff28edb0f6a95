#include "emotta/adapter.hpp"

#include <cmath>

#include "emotta/gaussian.hpp"
#include "emotta/zeroshot.hpp"

namespace emotta::adapter {

namespace {

// Sherman-Morrison: P <- (A + a u u^T)^-1 given P = A^-1.
void rank_one_precision_update(Matrix& precision, const Vector& u, double a) {
    if (a == 0.0) return;
    Vector pu = precision.selfadjointView<Eigen::Lower>() * u;
    const double denom = 1.0 + a * u.dot(pu);
    precision.noalias() -= (a / denom) * (pu * pu.transpose());
}

void refactorize(AdapterState& state) {
    const auto factor = gaussian::factorize(state.sigma, state.epsilon);
    Matrix fresh = factor.lower.triangularView<Eigen::Lower>().solve(
        Matrix::Identity(state.dim(), state.dim()));
    fresh = factor.lower.transpose().triangularView<Eigen::Upper>().solve(fresh);
    fresh = 0.5 * (fresh + fresh.transpose()).eval();
    state.last_refactor_drift = (state.precision - fresh).cwiseAbs().maxCoeff();
    state.precision = std::move(fresh);
}

}  // namespace

AdapterState init(const PrototypeSet& prototypes, const HyperParams& hyper) {
    prototypes.validate();
    hyper.validate();
    const Eigen::Index d = prototypes.dim();
    const Eigen::Index k = prototypes.num_classes();

    AdapterState state;
    state.mu = prototypes.prototypes;
    state.sigma = Matrix::Identity(d, d);
    state.pi = Vector::Constant(k, 1.0 / static_cast<double>(k));
    state.n_eff = Vector::Constant(k, 1.0 / static_cast<double>(k));
    state.n_total = 1.0;
    state.samples_seen = 0;
    state.epsilon = hyper.epsilon;
    state.precision = Matrix::Identity(d, d) / (1.0 + hyper.epsilon);
    state.last_refactor_drift = 0.0;
    return state;
}

double confidence_weight(double h, double beta) {
    if (h < 0.0) throw InvalidArgumentError("entropy must be >= 0");
    if (beta < 0.0) throw InvalidArgumentError("beta must be >= 0");
    return std::exp(-beta * h);
}

void m_step(AdapterState& state, const Embedding& x, const Vector& gamma, double w,
            const HyperParams& hyper) {
    if (x.size() != state.dim()) {
        throw DimensionMismatchError(state.dim(), x.size());
    }
    if (gamma.size() != state.num_classes()) {
        throw DimensionMismatchError(state.num_classes(), gamma.size());
    }
    if (!(w >= 0.0 && w <= 1.0)) {
        throw InvalidArgumentError("confidence weight must lie in [0, 1]");
    }
    if ((gamma.array() < -1e-12).any() || std::abs(gamma.sum() - 1.0) > 1e-6) {
        throw InvalidArgumentError("responsibilities are not on the simplex");
    }

    ++state.samples_seen;
    if (w == 0.0) return;

    const Eigen::Index k = state.num_classes();
    const double n_old = state.n_total;
    const double n_new = n_old + w;

    // Means first: the scatter uses the post-update means.
    if (hyper.mean_update) {
        for (Eigen::Index y = 0; y < k; ++y) {
            const double g = w * gamma[y];
            state.mu.col(y) = (state.n_eff[y] * state.mu.col(y) + g * x) /
                              (state.n_eff[y] + g);
        }
    }

    if (hyper.cov_update) {
        double scatter_scale = 0.0;
        if (hyper.covariance_rule == CovarianceRule::kLiteral) {
            scatter_scale = w / std::max(n_new - 1.0, 1.0);
        } else {
            scatter_scale = w / n_new;
            state.sigma *= n_old / n_new;
            state.precision *= n_new / n_old;
        }
        for (Eigen::Index y = 0; y < k; ++y) {
            const double coeff = scatter_scale * gamma[y];
            if (coeff <= 0.0) continue;
            Vector u = x - state.mu.col(y);
            state.sigma.noalias() += coeff * (u * u.transpose());
            rank_one_precision_update(state.precision, u, coeff);
        }
    }

    state.n_eff += w * gamma;
    state.n_total = n_new;
    state.pi = state.n_eff / state.n_total;

    if (hyper.cov_update && state.samples_seen % hyper.refactor_period == 0) {
        refactorize(state);
    }
}

Vector fuse_logits(const Embedding& x, const PrototypeSet& prototypes,
                   const AdapterState& state, double alpha, bool use_prior) {
    validate_dimensions(prototypes, x);
    if (state.dim() != prototypes.dim() || state.num_classes() != prototypes.num_classes()) {
        throw DimensionMismatchError(prototypes.dim(), state.dim());
    }
    const Eigen::Index k = state.num_classes();
    Vector px = state.precision.selfadjointView<Eigen::Lower>() * x;
    const double uniform_log_prior = -std::log(static_cast<double>(k));

    // Share the similarity term with the zero-shot path so that alpha = 0
    // reproduces its logits exactly, not merely up to rounding.
    Vector logits = zeroshot::cosine_logits(x, prototypes);
    for (Eigen::Index y = 0; y < k; ++y) {
        const auto mu_y = state.mu.col(y);
        Vector pmu = state.precision.selfadjointView<Eigen::Lower>() * mu_y;
        const double log_prior = use_prior ? std::log(state.pi[y]) : uniform_log_prior;
        const double generative = mu_y.dot(px) + log_prior - 0.5 * mu_y.dot(pmu);
        logits[y] += alpha * generative;
    }
    return logits;
}

PredictionOutcome process_sample(AdapterState& state, const Embedding& x,
                                 const PrototypeSet& prototypes, const HyperParams& hyper,
                                 StepTrace* trace) {
    PredictionOutcome out;
    out.zero_shot_probs = zeroshot::softmax_probs(zeroshot::cosine_logits(x, prototypes));
    out.entropy = zeroshot::entropy(out.zero_shot_probs);
    out.weight = hyper.alm_prior_weighting ? confidence_weight(out.entropy, hyper.beta) : 1.0;

    Vector log_scores = gaussian::gda_log_scores(x, state, /*use_prior=*/true);
    const double m = log_scores.maxCoeff();
    Vector g = (log_scores.array() - m).exp();
    const double z = g.sum();
    out.responsibilities = g / z;
    out.gda_log_posterior = log_scores.array() - (m + std::log(z));

    out.fused_logits = fuse_logits(x, prototypes, state, hyper.alpha,
                                   hyper.use_prior_in_prediction);
    out.predicted_class = argmax_index(out.fused_logits);

    Matrix mu_before;
    if (trace != nullptr) mu_before = state.mu;

    m_step(state, x, out.responsibilities, out.weight, hyper);

    if (trace != nullptr) {
        trace->sample_index = state.samples_seen - 1;
        trace->outcome = out;
        trace->mu_drift = (state.mu - mu_before).colwise().norm();
        trace->n_total_after = state.n_total;
    }
    return out;
}

std::vector<StepTrace> run_stream(AdapterState& state, const std::vector<Embedding>& stream,
                                  const PrototypeSet& prototypes, const HyperParams& hyper) {
    if (stream.empty()) {
        throw InvalidArgumentError("run_stream requires a non-empty stream");
    }
    std::vector<StepTrace> traces(stream.size());
    for (std::size_t t = 0; t < stream.size(); ++t) {
        process_sample(state, stream[t], prototypes, hyper, &traces[t]);
    }
    return traces;
}

}  // namespace emotta::adapter
