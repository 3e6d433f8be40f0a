#include "aptsp/errors.hpp"
#include "aptsp/instance.hpp"
#include "aptsp/random_instance.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace aptsp;

TEST_CASE("validation") {
    CHECK(validate_instance(uniform_metric(5, std::vector<double>(5, 1.0))).ok());
    CHECK(validate_instance(cycle_metric(6, std::vector<double>(6, 0.5))).ok());

    Instance bad(3, {0, 1, 5, 1, 0, 1, 5, 1, 0}, {1, 1, 1});
    auto r = validate_instance(bad);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "triangle");
    CHECK(r.violations.front().witness == std::vector<int>{0, 1, 2});

    Instance asym(2, {0, 1, 2, 0}, {0.5, 0.5});
    CHECK_FALSE(validate_instance(asym).ok());
    Instance prob(2, {0, 1, 1, 0}, {0.5, 1.5});
    CHECK(validate_instance(prob).violations.front().kind == "probability");

    Instance zero(3, {0, 0, 1, 0, 0, 1, 1, 1, 0}, {1, 1, 1});
    CHECK(validate_instance(zero, MetricMode::semi).ok());
    CHECK_FALSE(validate_instance(zero, MetricMode::strict).ok());

    CHECK_THROWS_AS(Instance(2, {0, 1, 1}, {1, 1}), InvalidInput);
}

TEST_CASE("tour permutation check") {
    Tour({2, 0, 1}).check_permutation(3);
    CHECK_THROWS_AS(Tour({0, 0, 1}).check_permutation(3), InvalidInput);
    CHECK_THROWS_AS(Tour({0, 1}).check_permutation(3), InvalidInput);
}

TEST_CASE("shortcut cost") {
    const Instance u = uniform_metric(6, std::vector<double>(6, 0.5));
    const Tour t = Tour::identity(6);
    CHECK(shortcut_cost(u, t, {{3}}) == 0.0);
    CHECK(shortcut_cost(u, t, {{0, 1, 2, 3, 4, 5}}) == doctest::Approx(6.0));
    CHECK(shortcut_cost(u, t, {{1, 4, 5}}) == doctest::Approx(3.0));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        RandomInstanceOptions o;
        o.n = 9;
        const Instance inst = random_euclidean_instance(o, rng);
        const Tour tour = random_tour(9, rng);
        const std::uint64_t m = rng() & 511;
        std::vector<int> act;
        for (int v : tour.order())
            if (m >> v & 1) act.push_back(v);
        CHECK(shortcut_cost_mask(inst, tour, m) == doctest::Approx(oracle::cycle(inst, act)));
    }
}

TEST_CASE("distance to set") {
    const Instance c = cycle_metric(8, std::vector<double>(8, 0.5));
    const std::vector<int> s{3, 6};
    CHECK(dist_to_set(c, 0, s) == 2.0);
    CHECK(dist_to_set(c, 3, s) == 0.0);
    CHECK(dist_to_set(uniform_metric(4, {1, 1, 1, 1}), 0, std::vector<int>{2}) == 1.0);
    CHECK_THROWS_AS(dist_to_set(c, 0, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("with_depot and with_probs") {
    const Instance u = uniform_metric(4, {0.2, 0.3, 0.4, 0.5});
    const Instance d = u.with_depot(2);
    CHECK(d.depot() == 2);
    CHECK(d.prob(2) == 1.0);
    CHECK(d.with_probs({0.1, 0.1, 0.1, 0.1}).depot() == std::nullopt);
    CHECK(u.total_probability() == doctest::Approx(1.4));
}

TEST_CASE("random instances are reproducible and metric") {
    std::mt19937_64 a(9), b(9);
    RandomInstanceOptions o;
    o.n = 7;
    const Instance x = random_euclidean_instance(o, a), y = random_euclidean_instance(o, b);
    CHECK(std::vector<double>(x.matrix().begin(), x.matrix().end()) ==
          std::vector<double>(y.matrix().begin(), y.matrix().end()));
    CHECK(validate_instance(x).ok());
    CHECK(x.depot() == 0);
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
}
