#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "emotta/adapter.hpp"
#include "emotta/synth.hpp"
#include "emotta/zeroshot.hpp"
#include "helpers.hpp"

using namespace emotta;
using namespace emotta::testing;

TEST_CASE("shift spec validation") {
    synth::ShiftSpec spec;
    CHECK_NOTHROW(spec.validate());

    synth::ShiftSpec one_class = spec;
    one_class.num_classes = 1;
    CHECK_THROWS_AS(one_class.validate(), InvalidArgumentError);

    synth::ShiftSpec too_many = spec;
    too_many.num_classes = 20;
    too_many.dim = 8;  // orthonormal prototypes need K <= d
    CHECK_THROWS_AS(too_many.validate(), InvalidArgumentError);

    synth::ShiftSpec bad_sigma = spec;
    bad_sigma.within_class_sigma = 0.0;
    CHECK_THROWS_AS(bad_sigma.validate(), InvalidArgumentError);

    synth::ShiftSpec bad_count = spec;
    bad_count.samples_per_stream = 0;
    CHECK_THROWS_AS(bad_count.validate(), InvalidArgumentError);

    synth::ShiftSpec bad_prior = spec;
    bad_prior.class_prior = Vector::Constant(4, 0.3);
    CHECK_THROWS_AS(bad_prior.validate(), InvalidArgumentError);

    synth::ShiftSpec wrong_prior_len = spec;
    wrong_prior_len.class_prior = Vector::Constant(3, 1.0 / 3.0);
    CHECK_THROWS_AS(wrong_prior_len.validate(), Error);
}

TEST_CASE("generation is deterministic for a fixed seed") {
    synth::ShiftSpec spec;
    spec.seed = 123;
    auto a = synth::generate(spec);
    auto b = synth::generate(spec);
    CHECK((a.prototypes.prototypes - b.prototypes.prototypes).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.true_means - b.true_means).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.stream.size() == b.stream.size());
    for (std::size_t t = 0; t < a.stream.size(); ++t) {
        CHECK((a.stream[t] - b.stream[t]).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.labels[t] == b.labels[t]);
    }

    spec.seed = 124;
    auto c = synth::generate(spec);
    CHECK((a.prototypes.prototypes - c.prototypes.prototypes).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("with no shift and negligible noise the zero-shot classifier is near-perfect") {
    synth::ShiftSpec spec;
    spec.shift_magnitude = 0.0;
    spec.within_class_sigma = 1e-6;
    spec.samples_per_stream = 500;
    spec.seed = 5;
    auto data = synth::generate(spec);
    int correct = 0;
    for (std::size_t t = 0; t < data.stream.size(); ++t) {
        const int pred =
            argmax_index(zeroshot::cosine_logits(data.stream[t], data.prototypes));
        if (pred == data.labels[t]) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(data.stream.size()) > 0.999);
}

TEST_CASE("label frequencies follow the requested prior") {
    synth::ShiftSpec spec;
    spec.samples_per_stream = 100000;
    spec.seed = 9;
    spec.class_prior = Vector(4);
    spec.class_prior << 0.5, 0.25, 0.15, 0.1;
    auto data = synth::generate(spec);
    std::map<int, int> counts;
    for (int y : data.labels) ++counts[y];
    for (int y = 0; y < 4; ++y) {
        const double freq =
            static_cast<double>(counts[y]) / static_cast<double>(spec.samples_per_stream);
        CHECK(std::abs(freq - spec.class_prior[y]) < 0.01);
    }
}

TEST_CASE("unnormalized class-conditional samples center on the true means") {
    synth::ShiftSpec spec;
    spec.samples_per_stream = 20000;
    spec.within_class_sigma = 0.3;
    spec.seed = 77;
    auto data = synth::generate(spec, /*normalize=*/false);

    std::vector<Vector> sums(4, Vector::Zero(spec.dim));
    std::vector<int> counts(4, 0);
    for (std::size_t t = 0; t < data.stream.size(); ++t) {
        sums[static_cast<std::size_t>(data.labels[t])] += data.stream[t];
        ++counts[static_cast<std::size_t>(data.labels[t])];
    }
    for (int y = 0; y < 4; ++y) {
        Vector mean = sums[static_cast<std::size_t>(y)] / static_cast<double>(counts[y]);
        // Each coordinate's sample mean has std sigma/sqrt(n); allow 4-sigma
        // plus slack across coordinates.
        const double bound =
            5.0 * spec.within_class_sigma / std::sqrt(static_cast<double>(counts[y]));
        CHECK((mean - data.true_means.col(y)).cwiseAbs().maxCoeff() < bound);
    }
}

TEST_CASE("batch oracle: initial state, one-sample agreement with the update") {
    std::mt19937_64 rng(81);
    auto protos = random_prototypes(6, 3, rng);
    HyperParams hyper;
    AdapterState init = adapter::init(protos, hyper);

    // Empty trace returns the initial estimates.
    auto empty = synth::batch_gda_oracle({}, {}, init);
    CHECK((empty.mu - init.mu).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((empty.pi - init.pi).cwiseAbs().maxCoeff() < 1e-15);

    // One full-weight one-hot sample matches a single m_step exactly.
    Vector x = random_unit(6, rng);
    Vector gamma = Vector::Zero(3);
    gamma[1] = 1.0;
    auto batch = synth::batch_gda_oracle({x}, {{1.0, gamma}}, init);
    AdapterState stepped = init;
    adapter::m_step(stepped, x, gamma, 1.0, hyper);
    CHECK((batch.mu - stepped.mu).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((batch.pi - stepped.pi).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("supervised fit: exact means on degenerate data and a hand dataset") {
    // Two classes in d = 1: {-1, -3} and {1, 3} give means -2 and 2 and a
    // pooled variance of (1 + 1 + 1 + 1) / (4 - 2) = 2.
    std::vector<Embedding> xs;
    for (double v : {-1.0, -3.0, 1.0, 3.0}) {
        Vector e(1);
        e << v;
        xs.push_back(e);
    }
    std::vector<int> labels{0, 0, 1, 1};
    AdapterState fit = synth::supervised_gda_upper_bound(xs, labels, 1e-6);
    CHECK(fit.mu(0, 0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.mu(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.sigma(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.pi[0] == doctest::Approx(0.5).epsilon(1e-12));

    // Repeated identical points per class: exact means, zero scatter.
    std::mt19937_64 rng(82);
    Vector a = random_unit(4, rng), b = random_unit(4, rng);
    std::vector<Embedding> degenerate{a, a, b, b, b};
    std::vector<int> dlabels{0, 0, 1, 1, 1};
    AdapterState dfit = synth::supervised_gda_upper_bound(degenerate, dlabels, 1e-6);
    CHECK((dfit.mu.col(0) - a).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((dfit.mu.col(1) - b).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(dfit.sigma.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(dfit.pi[1] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("the supervised ceiling beats zero-shot on a shifted stream") {
    synth::ShiftSpec spec;
    spec.seed = 3;
    spec.samples_per_stream = 2000;
    auto data = synth::generate(spec);

    AdapterState fit =
        synth::supervised_gda_upper_bound(data.stream, data.labels, 1e-4);
    int sup_correct = 0, zs_correct = 0;
    for (std::size_t t = 0; t < data.stream.size(); ++t) {
        if (gaussian::gda_predict(data.stream[t], fit, true) == data.labels[t]) {
            ++sup_correct;
        }
        if (argmax_index(zeroshot::cosine_logits(data.stream[t], data.prototypes)) ==
            data.labels[t]) {
            ++zs_correct;
        }
    }
    CHECK(sup_correct > zs_correct);
}
