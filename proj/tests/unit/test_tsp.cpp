#include "aptsp/errors.hpp"
#include "aptsp/random_instance.hpp"
#include "aptsp/tsp.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace aptsp;

namespace {
Subset all_of(int n) {
    Subset s(n);
    std::iota(s.begin(), s.end(), 0);
    return s;
}
}  // namespace

TEST_CASE("held-karp small cases") {
    Instance two(2, {0, 4, 4, 0}, {1, 1});
    CHECK(held_karp(two, {0, 1}).cost == 8.0);
    CHECK(held_karp(two, {1}).cost == 0.0);
    CHECK(held_karp(uniform_metric(7, std::vector<double>(7, 1)), all_of(7)).cost == doctest::Approx(7.0));
    CHECK_THROWS_AS(held_karp(uniform_metric(21, std::vector<double>(21, 1)), all_of(21)), BudgetExceeded);
}

TEST_CASE("held-karp matches permutation search") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 5; ++i) {
        RandomInstanceOptions o;
        o.n = 9;
        const Instance inst = random_euclidean_instance(o, rng);
        const TspResult r = held_karp(inst, all_of(9));
        CHECK(r.cost == doctest::Approx(oracle::tsp(inst, all_of(9))).epsilon(1e-12));
        CHECK(r.cost == doctest::Approx(oracle::cycle(inst, r.tour.order())).epsilon(1e-12));
    }
}

TEST_CASE("approximation guarantees") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 20; ++i) {
        RandomInstanceOptions o;
        o.n = 12;
        const Instance inst = random_euclidean_instance(o, rng);
        const double opt = held_karp(inst, all_of(12)).cost;
        const TspResult dt = double_tree(inst, all_of(12));
        const TspResult ch = christofides(inst, all_of(12));
        CHECK(dt.cost <= 2 * opt + 1e-9);
        CHECK(ch.guarantee == 1.5);
        CHECK(ch.cost <= 1.5 * opt + 1e-9);
        CHECK(ch.cost == doctest::Approx(oracle::cycle(inst, ch.tour.order())));
        const double lp = subtour_lp_value(inst, all_of(12)).value;
        CHECK(lp <= opt + 1e-7);
        CHECK(lp >= mst_cost(inst, all_of(12)) - 1e-7);
    }
    CHECK(christofides(uniform_metric(4, {1, 1, 1, 1}), all_of(4)).cost == doctest::Approx(4.0));
    CHECK(double_tree(uniform_metric(3, {1, 1, 1}), all_of(3)).cost == doctest::Approx(3.0));
    // path metric: MST is the path, the tour is twice its length
    std::vector<std::pair<double, double>> pts{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    const Instance path = euclidean_instance(pts, std::vector<double>(5, 1));
    CHECK(double_tree(path, all_of(5)).cost <= 2 * 4.0 + 1e-12);
    CHECK(christofides(path, all_of(5)).cost == doctest::Approx(8.0));
}

TEST_CASE("subtour LP") {
    CHECK(subtour_lp_value(uniform_metric(3, {1, 1, 1}), all_of(3)).value == doctest::Approx(3.0));
    // two unit triangles joined by long edges: the LP needs subtour cuts
    std::vector<std::pair<double, double>> pts{{0, 0}, {1, 0}, {0.5, 0.8}, {10, 0}, {11, 0}, {10.5, 0.8}};
    const Instance inst = euclidean_instance(pts, std::vector<double>(6, 1));
    const auto r = subtour_lp_value(inst, all_of(6));
    CHECK(r.cuts >= 1);
    CHECK(r.value <= held_karp(inst, all_of(6)).cost + 1e-7);
}

TEST_CASE("min cut") {
    // 0-1 (3), 1-2 (1), 2-3 (3), 0-2 (1)
    std::vector<double> cap(16, 0.0);
    auto set = [&](int a, int b, double c) { cap[a * 4 + b] = cap[b * 4 + a] = c; };
    set(0, 1, 3);
    set(1, 2, 1);
    set(2, 3, 3);
    set(0, 2, 1);
    const MinCut c = min_st_cut(cap, 4, 0, 3);
    CHECK(c.value == doctest::Approx(2.0));
    CHECK(c.source_side[0]);
    CHECK(c.source_side[1]);
    CHECK_FALSE(c.source_side[3]);
}

TEST_CASE("tsp kind parsing") {
    CHECK(parse_tsp_kind("exact") == TspKind::exact);
    CHECK(parse_tsp_kind("christofides") == TspKind::christofides);
    CHECK(parse_tsp_kind("double-tree") == TspKind::double_tree);
    CHECK_THROWS_AS(parse_tsp_kind("nope"), InvalidInput);
}
