#pragma once

// Independent reference computations used by the unit tests. They only read
// distances and probabilities from the instance, never call library algorithms.

#include "aptsp/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

inline double cycle(const aptsp::Instance& inst, const std::vector<int>& order) {
    if (order.size() < 2) return 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) c += inst.dist(order[i], order[(i + 1) % order.size()]);
    return c;
}

inline double mask_prob(const aptsp::Instance& inst, std::uint64_t mask) {
    double pr = 1.0;
    for (int v = 0; v < inst.size(); ++v) pr *= (mask >> v & 1) ? inst.prob(v) : 1.0 - inst.prob(v);
    return pr;
}

// E[c(T[A])] by summing over all 2^n active sets.
inline double expected_cost(const aptsp::Instance& inst, const std::vector<int>& tour) {
    const int n = inst.size();
    double total = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        std::vector<int> act;
        for (int v : tour)
            if (m >> v & 1) act.push_back(v);
        total += mask_prob(inst, m) * cycle(inst, act);
    }
    return total;
}

// Shortest Hamiltonian cycle over s by trying every permutation.
inline double tsp(const aptsp::Instance& inst, std::vector<int> s) {
    if (s.size() < 2) return 0.0;
    std::sort(s.begin() + 1, s.end());
    double best = std::numeric_limits<double>::infinity();
    do best = std::min(best, cycle(inst, s));
    while (std::next_permutation(s.begin() + 1, s.end()));
    return best;
}

// Optimal a priori tour cost by trying every cyclic order.
inline double apriori_opt(const aptsp::Instance& inst) {
    std::vector<int> t(inst.size());
    std::iota(t.begin(), t.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do best = std::min(best, expected_cost(inst, t));
    while (std::next_permutation(t.begin() + 1, t.end()));
    return best;
}

inline double dist_to(const aptsp::Instance& inst, int v, const std::vector<int>& s) {
    double d = std::numeric_limits<double>::infinity();
    for (int u : s) d = std::min(d, inst.dist(v, u));
    return d;
}

// Master route cost by enumeration: tour over s when two or more customers are
// active, plus round trips of active outsiders to their nearest member of s.
inline double mr_cost(const aptsp::Instance& inst, const std::vector<int>& s, double master_cost) {
    const int n = inst.size();
    double total = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        if (__builtin_popcountll(m) < 2) continue;
        double c = master_cost;
        for (int v = 0; v < n; ++v)
            if ((m >> v & 1) && std::find(s.begin(), s.end(), v) == s.end()) c += 2.0 * dist_to(inst, v, s);
        total += mask_prob(inst, m) * c;
    }
    return total;
}

}  // namespace oracle
