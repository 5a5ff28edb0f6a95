#include <random>

#include "doctest.h"
#include "emotta/types.hpp"
#include "helpers.hpp"

using namespace emotta;
using namespace emotta::testing;

TEST_CASE("validate_dimensions accepts matching dimensions") {
    std::mt19937_64 rng(1);
    auto protos = random_prototypes(16, 4, rng);
    CHECK_NOTHROW(validate_dimensions(protos, random_unit(16, rng)));
}

TEST_CASE("validate_dimensions rejects a length mismatch naming both lengths") {
    std::mt19937_64 rng(2);
    auto protos = random_prototypes(16, 4, rng);
    try {
        validate_dimensions(protos, random_unit(8, rng));
        FAIL("expected DimensionMismatchError");
    } catch (const DimensionMismatchError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("16") != std::string::npos);
        CHECK(msg.find("8") != std::string::npos);
    }
}

TEST_CASE("a single-class prototype set is invalid") {
    std::mt19937_64 rng(3);
    PrototypeSet protos;
    protos.prototypes = random_unit(16, rng);
    protos.class_names = {"only"};
    CHECK_THROWS_AS(validate_dimensions(protos, random_unit(16, rng)),
                    InvalidPrototypeSetError);
    CHECK_THROWS_AS(protos.validate(), InvalidPrototypeSetError);
}

TEST_CASE("prototype set rejects non-finite entries and name count mismatch") {
    std::mt19937_64 rng(4);
    auto protos = random_prototypes(4, 3, rng);
    protos.prototypes(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(protos.validate(), InvalidPrototypeSetError);

    auto protos2 = random_prototypes(4, 3, rng);
    protos2.class_names.pop_back();
    CHECK_THROWS_AS(protos2.validate(), InvalidPrototypeSetError);
}

TEST_CASE("l2_normalized returns a unit vector and rejects degenerate input") {
    std::mt19937_64 rng(5);
    Vector v = gaussian_vector(10, rng) * 3.7;
    CHECK(l2_normalized(v).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(l2_normalized(Vector::Zero(5)), InvalidArgumentError);
    Vector bad = Vector::Ones(4);
    bad[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(l2_normalized(bad), InvalidArgumentError);
}

TEST_CASE("argmax_index breaks ties by lowest index") {
    Vector v(4);
    v << 1.0, 3.0, 3.0, 2.0;
    CHECK(argmax_index(v) == 1);
    Vector w = Vector::Constant(5, 0.25);
    CHECK(argmax_index(w) == 0);
}

TEST_CASE("hyperparameter constraints are enforced") {
    HyperParams h;
    CHECK_NOTHROW(h.validate());
    HyperParams bad_alpha = h;
    bad_alpha.alpha = -0.1;
    CHECK_THROWS_AS(bad_alpha.validate(), InvalidArgumentError);
    HyperParams bad_beta = h;
    bad_beta.beta = -1.0;
    CHECK_THROWS_AS(bad_beta.validate(), InvalidArgumentError);
    HyperParams bad_eps = h;
    bad_eps.epsilon = 0.0;
    CHECK_THROWS_AS(bad_eps.validate(), InvalidArgumentError);
    HyperParams bad_period = h;
    bad_period.refactor_period = 0;
    CHECK_THROWS_AS(bad_period.validate(), InvalidArgumentError);
}

TEST_CASE("hyperparameter defaults match the documented values") {
    HyperParams h;
    CHECK(h.alpha == doctest::Approx(0.2));
    CHECK(h.beta == doctest::Approx(4.5));
    CHECK(h.epsilon == doctest::Approx(1e-4));
    CHECK(h.mean_update);
    CHECK(h.cov_update);
    CHECK(h.alm_prior_weighting);
    CHECK(h.use_prior_in_prediction);
    CHECK(h.covariance_rule == CovarianceRule::kConvex);
    CHECK(h.refactor_period == 256);
    CHECK(h.normalize_embeddings);
}

TEST_CASE("adapter state validation catches each invariant violation") {
    std::mt19937_64 rng(6);
    AdapterState good = random_state(4, 3, rng);
    CHECK_NOTHROW(good.validate());

    AdapterState bad_pi = good;
    bad_pi.pi[0] += 0.1;
    CHECK_THROWS_AS(bad_pi.validate(), InvalidArgumentError);

    AdapterState bad_sym = good;
    bad_sym.sigma(0, 1) += 1e-6;
    CHECK_THROWS_AS(bad_sym.validate(), InvalidArgumentError);

    AdapterState bad_counts = good;
    bad_counts.n_total += 0.5;
    CHECK_THROWS_AS(bad_counts.validate(), InvalidArgumentError);

    AdapterState bad_finite = good;
    bad_finite.mu(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(bad_finite.validate(), InvalidArgumentError);
}

TEST_CASE("states built from random valid update sequences keep their invariants") {
    std::mt19937_64 rng(7);
    auto protos = random_prototypes(6, 3, rng);
    HyperParams hyper;
    hyper.beta = 0.5;  // larger weights exercise the updates harder
    AdapterState state = adapter::init(protos, hyper);
    std::uniform_real_distribution<double> uw(0.01, 1.0);
    for (int t = 0; t < 300; ++t) {
        adapter::m_step(state, random_unit(6, rng), random_simplex(3, rng), uw(rng), hyper);
        CHECK_NOTHROW(state.validate());
    }
}
