#include "aptsp/algorithms.hpp"
#include "aptsp/errors.hpp"
#include "aptsp/random_instance.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace aptsp;

namespace {
Instance depot_instance(int n, std::uint64_t seed, double p_min = 0.05, double p_max = 0.95) {
    std::mt19937_64 rng(seed);
    RandomInstanceOptions o;
    o.n = n;
    o.p_min = p_min;
    o.p_max = p_max;
    return random_euclidean_instance(o, rng);
}
}  // namespace

TEST_CASE("sampling policies") {
    const SamplingPolicy pw = SamplingPolicy::parse("power:0.663");
    CHECK(pw.kind == SamplingPolicy::Kind::power);
    CHECK(pw(0.5) == doctest::Approx(1 - std::pow(0.5, 0.663)));
    CHECK(pw(1.0) == 1.0);
    CHECK(SamplingPolicy::parse("identity")(0.3) == 0.3);
    CHECK(SamplingPolicy::parse("scaled:0.5")(0.3) == doctest::Approx(0.15));
    CHECK(SamplingPolicy::parse(pw.to_string()).sigma == pw.sigma);
    CHECK_THROWS_AS(SamplingPolicy::parse("power:1.5"), InvalidInput);
    CHECK_THROWS_AS(SamplingPolicy::parse("bogus"), InvalidInput);

    // inclusion frequency
    const Instance inst = uniform_metric(11, {1, .5, .5, .5, .5, .5, .5, .5, .5, .5, .5}, 0);
    long hits = 0;
    const int draws = 100'000;
    for (int s = 0; s < draws; ++s) hits += static_cast<long>(sample_master_set(inst, pw, s).size()) - 1;
    const double freq = static_cast<double>(hits) / (10.0 * draws);
    CHECK(std::abs(freq - 0.3686) < 0.003);

    const Instance all = uniform_metric(5, std::vector<double>(5, 1.0), 0);
    CHECK(sample_master_set(all, pw, 3).size() == 5);
    CHECK(sample_master_set(inst, pw, 7) == sample_master_set(inst, pw, 7));
}

TEST_CASE("master route tour") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = depot_instance(10, 100 + seed);
        Subset s{0};
        for (int v = 1; v < 10; ++v)
            if ((seed + v) % 3 == 0) s.push_back(v);
        const MasterRouteTour m = build_master_route_tour(inst, s, TspKind::exact);
        m.tour.check_permutation(10);
        CHECK(expected_tour_cost_exact(inst, m.tour) <= mr_cost_exact(inst, s, m.solution.master_cost) + 1e-9);
        CHECK(m.solution.master_cost == doctest::Approx(oracle::tsp(inst, s)));
    }
    // pendants follow their hub
    std::vector<std::pair<double, double>> pts{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {5, 15},
                                               {0.5, 0}, {10.5, 0}, {10, 10.5}, {0, 10.5}, {5, 15.5}, {-0.5, 0}};
    std::vector<double> p(11, 0.3);
    p[0] = 1;
    const Instance fig = euclidean_instance(pts, p, 0);
    const MasterRouteTour m = build_master_route_tour(fig, {0, 1, 2, 3, 4}, TspKind::exact);
    const auto& o = m.tour.order();
    for (int v = 5; v < 11; ++v) {
        const int hub = m.solution.hub[v];
        const auto pos = std::find(o.begin(), o.end(), v) - o.begin();
        bool after_hub_run = false;
        for (auto k = pos - 1; k >= 0; --k) {
            if (o[k] == hub) {
                after_hub_run = true;
                break;
            }
            if (m.solution.hub[o[k]] != hub) break;
        }
        CHECK(after_hub_run);
    }
    // S = V gives the TSP tour
    Subset allv{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(cycle_cost(fig, build_master_route_tour(fig, allv, TspKind::exact).tour.order()) ==
          doctest::Approx(oracle::tsp(fig, allv)));
}

TEST_CASE("sampling algorithm") {
    const Instance inst = depot_instance(8, 200);
    const SamplingPolicy pw{SamplingPolicy::Kind::power, 0.663};
    CHECK(run_sampling_algorithm(inst, pw, TspKind::exact, 7).order() ==
          run_sampling_algorithm(inst, pw, TspKind::exact, 7).order());
    const double opt = oracle::apriori_opt(inst);
    double mean = 0;
    for (int s = 0; s < 2000; ++s) mean += expected_tour_cost_exact(inst, run_sampling_algorithm(inst, pw, TspKind::exact, s));
    CHECK(mean / 2000 <= 3.1 * opt);
    const Instance full = uniform_metric(6, std::vector<double>(6, 1.0), 0);
    CHECK(cycle_cost(full, run_sampling_algorithm(full, pw, TspKind::exact, 1).order()) == doctest::Approx(6.0));
}

TEST_CASE("low activity enumeration") {
    const Instance inst = depot_instance(6, 300).with_probs({0.2, 0.1, 0.3, 0.05, 0.1, 0.2});
    const LowActivityResult full = solve_low_activity(inst, 6);
    // oracle: every S with |S| >= 2, best master-route tour
    double best = 1e300;
    for (std::uint64_t m = 0; m < 64; ++m) {
        if (__builtin_popcountll(m) < 2) continue;
        const Subset s = subset_from_mask(m, 6);
        best = std::min(best, expected_tour_cost_exact(inst, build_master_route_tour(inst, s, TspKind::exact).tour));
    }
    CHECK(full.cost == doctest::Approx(best));
    CHECK(solve_low_activity(inst, 10).cost == full.cost);
    CHECK(solve_low_activity(inst, 10).master_set == full.master_set);

    const Instance u = uniform_metric(8, std::vector<double>(8, 0.01));
    const LowActivityResult pair = solve_low_activity(u, 2);
    CHECK(pair.master_set.size() == 2);
    CHECK(pair.cost <= 3 * oracle::apriori_opt(u) + 1e-12);
    CHECK(default_n_max(u, 0.5) == 8);
}

TEST_CASE("best depot") {
    const Instance inst = depot_instance(8, 400).with_probs({0.3, 0.5, 0.7, 0.2, 0.9, 0.4, 0.6, 0.8});
    const SamplingPolicy pw{SamplingPolicy::Kind::power, 0.663};
    const DepotChoice c = best_depot_tour(inst, [&](const Instance& d) {
        return run_sampling_algorithm(d, pw, TspKind::exact, 5);
    });
    REQUIRE(c.candidate_costs.size() == 8);
    CHECK(c.cost == doctest::Approx(*std::min_element(c.candidate_costs.begin(), c.candidate_costs.end())));
    for (int v = 0; v < 8; ++v) {
        const Tour t = run_sampling_algorithm(inst.with_depot(v), pw, TspKind::exact, 5);
        CHECK(c.candidate_costs[v] == doctest::Approx(expected_cost_bruteforce(inst, t)).epsilon(1e-12));
    }
}

TEST_CASE("dispatch") {
    AprioriConfig cfg;
    const Instance low = uniform_metric(5, {0.1, 0.1, 0.1, 0.1, 0.1});
    const AprioriResult r = solve_apriori(low, 0.5, cfg);
    CHECK(r.trace.branch == "low-activity");
    CHECK(*r.trace.threshold == doctest::Approx(12.4));

    const Instance busy = depot_instance(8, 500).with_probs(std::vector<double>(8, 0.9)).with_depot(0);
    cfg.tsp = TspKind::exact;
    const AprioriResult d = solve_apriori(busy, 0.5, cfg);
    CHECK(d.trace.branch == "depot");
    CHECK(d.expected_cost <= 3.6 * oracle::apriori_opt(busy));

    cfg.algo = AlgoKind::sampling;
    CHECK_THROWS_AS(solve_apriori(low, 0.5, cfg), InvalidInput);
    CHECK(parse_algo_kind("low-activity") == AlgoKind::low_activity);
    CHECK_THROWS_AS(parse_algo_kind("x"), InvalidInput);
}

TEST_CASE("normalization") {
    const Instance u = uniform_metric(4, {1, 0.2, 0.2, 0.2}, 0);
    const NormalizedInstance same = normalize_instance(u, 0.2, 0.5);
    CHECK(same.instance.size() == 4);
    CHECK(same.plan.copies == std::vector<int>{1, 1, 1, 1});

    const Instance half = uniform_metric(2, {1, 0.5}, 0);
    const NormalizedInstance h = normalize_instance(half, 0.01, 0.1);
    CHECK(h.plan.copies[1] == 68);
    CHECK(1 - std::pow(0.99, 68) <= 0.5);
    CHECK(normalization_violations(half, h.plan).empty());
    CHECK(h.instance.size() == 69);
    CHECK(h.instance.dist(1, 2) == 0.0);

    NormalizationPlan broken = h.plan;
    broken.copies[1] = 80;
    CHECK_FALSE(normalization_violations(half, broken).empty());
    CHECK_THROWS_AS(normalize_instance(half, 0.01, 0.0), InvalidInput);
    CHECK_THROWS_AS(normalize_instance(uniform_metric(2, {0.5, 0.5}), 0.1, 0.1), InvalidInput);
}

TEST_CASE("conditional connection cost") {
    const Instance inst = depot_instance(7, 600);
    const int n = 7;
    std::vector<char> in_p(n, 0), in_pbar(n, 0);
    in_p[0] = 1;
    double ref = 0.0;
    for (std::uint64_t m = 1; m < (1u << n); m += 2) {
        double pr = 1.0;
        std::vector<int> s;
        for (int v = 0; v < n; ++v) {
            const bool in = m >> v & 1;
            if (v > 0) pr *= in ? inst.prob(v) : 1 - inst.prob(v);
            if (in) s.push_back(v);
        }
        double c = 0.0;
        for (int v = 0; v < n; ++v) c += 2 * inst.prob(v) * oracle::dist_to(inst, v, s);
        ref += pr * c;
    }
    CHECK(conditional_connection_cost(inst, in_p, in_pbar) == doctest::Approx(ref).epsilon(1e-12));

    std::vector<char> p2(n, 0), pb2(n, 1);
    p2[0] = p2[3] = 1;
    pb2[0] = pb2[3] = 0;
    double fixed = 0.0;
    for (int v = 0; v < n; ++v) fixed += 2 * inst.prob(v) * oracle::dist_to(inst, v, {0, 3});
    CHECK(conditional_connection_cost(inst, p2, pb2) == doctest::Approx(fixed));
}

TEST_CASE("derandomization") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Instance inst = depot_instance(7, 700 + seed);
        const DerandResult r = derandomized_master_route(inst, TspKind::christofides);
        for (std::size_t i = 1; i < r.estimator.size(); ++i) CHECK(r.estimator[i] <= r.estimator[i - 1] * (1 + 1e-9));
        const double cost = expected_tour_cost_exact(inst, r.tour);
        CHECK(cost <= r.estimator.front() + 1e-9);
        CHECK(cost <= 6.5 * oracle::apriori_opt(inst));
    }
    const Instance all = uniform_metric(5, std::vector<double>(5, 1.0), 0);
    const DerandResult a = derandomized_master_route(all, TspKind::exact);
    CHECK(a.master_set.size() == 5);
    CHECK(expected_tour_cost_exact(all, a.tour) == doctest::Approx(5.0));
    const Instance tiny = uniform_metric(6, {1, 1e-3, 1e-3, 1e-3, 1e-3, 1e-3}, 0);
    CHECK(derandomized_master_route(tiny, TspKind::exact).master_set == Subset{0});
    CHECK(subtour_lp_factor(TspKind::double_tree) == 2.0);
    CHECK(subtour_lp_factor(TspKind::christofides) == 1.5);
}
