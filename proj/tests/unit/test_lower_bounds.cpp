#include "aptsp/errors.hpp"
#include "aptsp/evaluation.hpp"
#include "aptsp/instance.hpp"
#include "aptsp/lower_bounds.hpp"

#include <doctest.h>

#include <cmath>

using namespace aptsp;

TEST_CASE("sampling lower-bound instance") {
    const SamplingLbParams prm{1.62, 1.62 / 50, 500};
    const Instance inst = gen_sampling_lb_instance(prm);
    CHECK(inst.size() == 500);
    CHECK(inst.depot() == 0);
    CHECK(validate_instance(inst).ok());
    CHECK(sampling_lb_c(prm, 1) == 50);
    CHECK(sampling_lb_c(prm, 50) == 50);
    CHECK(sampling_lb_c(prm, 51) == 51);
    CHECK(inst.dist(3, 10) == inst.dist(10, 3));
    CHECK(inst.dist(0, 499) == doctest::Approx(50.0 / 500));
    CHECK_THROWS_AS((SamplingLbParams{2.5, 0.1, 100}.validate()), InvalidInput);
    CHECK_THROWS_AS((SamplingLbParams{1.0, 0.3, 100}.validate()), InvalidInput);
    CHECK_NOTHROW((SamplingLbParams{1.0, 1.0, 10}.validate()));
}

TEST_CASE("OPT upper bound for the sampling family") {
    // the always-active depot splits one gap, which costs up to about K/n on top of the closed form
    const SamplingLbParams prm{1.0, 0.01, 5000};
    const OptUpperBound b = opt_upper_bound_sampling_lb(prm);
    CHECK(std::abs(b.exact - (1 + std::exp(-1.0))) / (1 + std::exp(-1.0)) < 0.02);
    CHECK(b.closed >= b.exact - (prm.plateau() + 2.0) / prm.n);
    const OptUpperBound w = opt_upper_bound_sampling_lb({1.0, 1.0, 10});
    CHECK(std::isfinite(w.closed));
}

TEST_CASE("hop sum closed form") {
    const SamplingLbParams prm{1.5, 0.05, 100};
    for (double beta : {0.2, 1.0, 20.0})
        for (long long k : {30LL, 45LL, 400LL}) {
            long double s = 0, x = beta * prm.p, pw = 1;
            for (long long i = 1; i <= k; ++i, pw *= 1 - x) s += x * x * pw * sampling_lb_c(prm, i);
            CHECK(hop_sum_closed(beta, prm, k) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
        }
}

TEST_CASE("ratio and optimizers") {
    CHECK(sampling_lb_ratio(1.0, 1.623, 0.623) > 2.655);
    CHECK(sampling_lb_ratio(1.4999, 1.291, 0.663) > 3.049);
    CHECK(sampling_lb_ratio(4.0 / 3.0, 1.383, 0.651) > 2.914);
    CHECK(optimize_sigma(1.0, 1.623) == doctest::Approx(0.623).epsilon(2e-3));
    CHECK(optimize_sigma(1.4999, 1.291) == doctest::Approx(0.663).epsilon(2e-3));
    for (double alpha : {1.0, 1.25, 1.4999})
        for (double gamma : {1.0, 1.3, 1.7, 2.0}) {
            const double s = optimize_sigma(alpha, gamma);
            const double r = sampling_lb_ratio(alpha, gamma, s);
            CHECK(sampling_lb_ratio(alpha, gamma, s + 1e-4) >= r);
            CHECK(sampling_lb_ratio(alpha, gamma, s - 1e-4) >= r);
        }
    const GammaSigma g = optimize_gamma_sigma(1.0);
    CHECK(g.gamma == doctest::Approx(1.623).epsilon(2e-3));
    CHECK(g.ratio > 2.655);
}

TEST_CASE("master-route-ratio family") {
    const Instance one = gen_mrr_lb_instance({1, 1});
    CHECK(one.size() == 2);
    CHECK(one.dist(0, 1) == 1.0);
    CHECK(one.prob(1) == 0.5);

    const Instance inst = gen_mrr_lb_instance({3, 2});
    CHECK(inst.size() == 7);
    CHECK(validate_instance(inst, MetricMode::semi).ok());
    CHECK_FALSE(validate_instance(inst, MetricMode::strict).ok());
    const MinMrResult mr = min_mr_bruteforce(inst);
    CHECK(mr.set == Subset{0});
    CHECK(mr.cost == doctest::Approx(3.0));
    CHECK(mr_cost_exact(inst, {0}, 0.0) == doctest::Approx(3.0));

    const MrrLbParams p{4, 3};
    const double r = mrr_lb_ratio(p);
    CHECK(r >= 1.0);
    CHECK(r <= 3.0);
    CHECK(mrr_lb_ratio({1000, 1'000'000}) >= 2.52);
    const MrrLbParams single{1, 5};
    CHECK(mrr_lb_ratio(single) == doctest::Approx(1.0 / (single.q() + 1.0)));
    const double lim = mrr_lb_ratio({1'000'000, 1'000'000});
    CHECK(lim == doctest::Approx(1.0 / (1.0 - std::exp(-0.5))).epsilon(1e-4));
    CHECK_THROWS_AS(gen_mrr_lb_instance({0, 2}), InvalidInput);
}
