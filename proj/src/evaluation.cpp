#include "aptsp/evaluation.hpp"

#include "aptsp/errors.hpp"
#include "aptsp/random_instance.hpp"
#include "aptsp/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace aptsp {

const char* to_string(EvalMethod method) {
    switch (method) {
        case EvalMethod::exact: return "exact";
        case EvalMethod::monte_carlo: return "monte_carlo";
        case EvalMethod::brute_force: return "brute_force";
    }
    return "unknown";
}

double expected_tour_cost_exact(const Instance& inst, const Tour& tour) {
    tour.check_permutation(inst.size());
    const auto& ord = tour.order();
    const int n = static_cast<int>(ord.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const int u = ord[i];
        const double pu = inst.prob(u);
        double between = 1.0;  // prod of (1-p) strictly between u and the current w
        for (int step = 1; step < n && between > 0.0; ++step) {
            const int w = ord[(i + step) % n];
            total += pu * inst.prob(w) * between * inst.dist(u, w);
            between *= 1.0 - inst.prob(w);
        }
    }
    return total;
}

double expected_cost_bruteforce(const Instance& inst, const Tour& tour) {
    const int n = inst.size();
    if (n > kBruteForceSubsetLimit)
        throw InvalidInput("brute-force evaluation limited to " + std::to_string(kBruteForceSubsetLimit) + " customers");
    tour.check_permutation(n);
    double total = 0.0;
    const std::uint64_t full = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < full; ++mask) {
        double pr = 1.0;
        for (int v = 0; v < n; ++v) pr *= (mask >> v & 1U) ? inst.prob(v) : 1.0 - inst.prob(v);
        if (pr == 0.0) continue;
        total += pr * shortcut_cost_mask(inst, tour, mask);
    }
    return total;
}

namespace {

struct Moments {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    // Chan et al. pairwise combination
    void merge(const Moments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }
};

Moments run_block(const Instance& inst, const Tour& tour, long long count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& ord = tour.order();
    Moments m;
    for (long long s = 0; s < count; ++s) {
        int first = -1, prev = -1, active = 0;
        double cost = 0.0;
        for (int v : ord) {
            if (!(unit(rng) < inst.prob(v))) continue;
            if (first < 0) first = v;
            else cost += inst.dist(prev, v);
            prev = v;
            ++active;
        }
        if (active >= 2) cost += inst.dist(prev, first);
        else cost = 0.0;
        m.add(cost);
    }
    return m;
}

}  // namespace

ExpectedCostReport expected_cost_monte_carlo(const Instance& inst, const Tour& tour, long long samples,
                                             std::uint64_t seed, int threads) {
    if (samples < 1) throw InvalidInput("Monte Carlo needs at least one sample");
    tour.check_permutation(inst.size());
    const long long blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<Moments> per_block(static_cast<std::size_t>(blocks));
    auto work = [&](long long b) {
        const long long count = std::min(kMonteCarloBlock, samples - b * kMonteCarloBlock);
        per_block[static_cast<std::size_t>(b)] = run_block(inst, tour, count, derive_seed(seed, static_cast<std::uint64_t>(b)));
    };
    threads = std::max(1, threads);
    if (threads == 1 || blocks == 1) {
        for (long long b = 0; b < blocks; ++b) work(b);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (long long b = t; b < blocks; b += threads) work(b);
            });
        for (auto& th : pool) th.join();
    }
    Moments total;
    for (const auto& m : per_block) total.merge(m);
    ExpectedCostReport r;
    r.value = total.mean;
    r.method = EvalMethod::monte_carlo;
    r.samples = samples;
    const double var = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
    r.stderr_value = std::sqrt(std::max(var, 0.0) / static_cast<double>(total.count));
    return r;
}

namespace {

void check_master_set(const Instance& inst, const Subset& s) {
    if (s.empty()) throw InvalidInput("master set is empty");
    for (int v : s)
        if (v < 0 || v >= inst.size()) throw InvalidInput("master set entry out of range");
}

}  // namespace

double mr_cost_exact(const Instance& inst, const Subset& s, double master_cost) {
    const auto d = inst.depot();
    if (!d) throw InvalidInput("mr_cost_exact needs a depot");
    check_master_set(inst, s);
    if (std::find(s.begin(), s.end(), *d) == s.end()) throw InvalidInput("master set must contain the depot");
    double none = 1.0, conn = 0.0;
    for (int v = 0; v < inst.size(); ++v) {
        if (v == *d) continue;
        none *= 1.0 - inst.prob(v);
        conn += inst.prob(v) * dist_to_set(inst, v, s);
    }
    return (1.0 - none) * master_cost + 2.0 * conn;
}

double mr_cost_exact_general(const Instance& inst, const Subset& s, double master_cost) {
    check_master_set(inst, s);
    const int n = inst.size();
    // prefix[i] = prod_{u<i}(1-p_u), suffix[i] = prod_{u>=i}(1-p_u); avoids dividing by 1-p_v when p_v = 1
    std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * (1.0 - inst.prob(i));
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * (1.0 - inst.prob(i));
    double exactly_one = 0.0, conn = 0.0;
    for (int v = 0; v < n; ++v) {
        const double others_inactive = prefix[v] * suffix[v + 1];
        exactly_one += inst.prob(v) * others_inactive;
        // v active and at least one other active
        conn += inst.prob(v) * dist_to_set(inst, v, s) * (1.0 - others_inactive);
    }
    const double at_least_two = std::max(0.0, 1.0 - prefix[n] - exactly_one);
    return at_least_two * master_cost + 2.0 * conn;
}

MinMrResult min_mr_bruteforce(const Instance& inst) {
    const int n = inst.size();
    if (n > kMinMrLimit) throw InvalidInput("min_mr_bruteforce limited to " + std::to_string(kMinMrLimit) + " customers");
    const auto d = inst.depot();
    MinMrResult best;
    bool have = false;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        if (d && !(mask >> *d & 1U)) continue;
        const Subset s = subset_from_mask(mask, n);
        const double cost = mr_cost_exact_general(inst, s, held_karp(inst, s).cost);
        if (!have || cost < best.cost) {
            best.set = s;
            best.cost = cost;
            have = true;
        }
    }
    return best;
}

AprioriOptimum brute_force_optimum(const Instance& inst) {
    const int n = inst.size();
    if (n > kBruteForceTourLimit)
        throw InvalidInput("brute-force optimum limited to " + std::to_string(kBruteForceTourLimit) + " customers");
    AprioriOptimum best;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (n <= 3) {
        best.tour = Tour(order);
        best.cost = expected_tour_cost_exact(inst, best.tour);
        return best;
    }
    bool have = false;
    // fix customer 0 first; skip the reversed copy of every cycle
    do {
        if (order[1] > order[n - 1]) continue;
        Tour t(order);
        const double c = expected_tour_cost_exact(inst, t);
        if (!have || c < best.cost) {
            best.tour = t;
            best.cost = c;
            have = true;
        }
    } while (std::next_permutation(order.begin() + 1, order.end()));
    return best;
}

double empirical_master_route_ratio(const Instance& inst) {
    const double mr = min_mr_bruteforce(inst).cost;
    const double opt = brute_force_optimum(inst).cost;
    if (opt == 0.0) {
        if (mr == 0.0) return 1.0;
        return std::numeric_limits<double>::infinity();
    }
    return mr / opt;
}

double expected_sampled_mr(const Instance& inst, const std::vector<double>& inclusion) {
    const auto d = inst.depot();
    if (!d) throw InvalidInput("expected_sampled_mr needs a depot");
    const int n = inst.size();
    if (n > kBruteForceSubsetLimit) throw InvalidInput("expected_sampled_mr limited to 20 customers");
    if (static_cast<int>(inclusion.size()) != n) throw InvalidInput("inclusion vector must have n entries");
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (!(mask >> *d & 1U)) continue;
        double pr = 1.0;
        for (int v = 0; v < n; ++v) {
            if (v == *d) continue;
            pr *= (mask >> v & 1U) ? inclusion[v] : 1.0 - inclusion[v];
        }
        if (pr == 0.0) continue;
        const Subset s = subset_from_mask(mask, n);
        total += pr * mr_cost_exact(inst, s, held_karp(inst, s).cost);
    }
    return total;
}

}  // namespace aptsp
