#pragma once

#include "aptsp/instance.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aptsp {

struct MasterRouteSolution {
    Subset master_set;
    Tour master_tour;      ///< order over master_set
    std::vector<int> hub;  ///< hub[v] = nearest master customer (v itself for members)
    double master_cost = 0.0;
};

enum class EvalMethod { exact, monte_carlo, brute_force };

const char* to_string(EvalMethod method);

struct ExpectedCostReport {
    double value = 0.0;
    EvalMethod method = EvalMethod::exact;
    std::optional<double> stderr_value;  ///< set only for monte_carlo
    std::optional<long long> samples;    ///< set only for monte_carlo
};

/// E[c(T[A])] by summing, over ordered pairs (u, w), the probability that w is the
/// next active customer after u along the stored orientation. O(n^2).
double expected_tour_cost_exact(const Instance& inst, const Tour& tour);

inline constexpr int kBruteForceSubsetLimit = 20;
inline constexpr int kBruteForceTourLimit = 9;
inline constexpr int kMinMrLimit = 12;

/// Sum over all 2^n active sets. Throws InvalidInput for n > 20.
double expected_cost_bruteforce(const Instance& inst, const Tour& tour);

/// Mean of shortcut costs over i.i.d. active sets. Samples are split into
/// fixed-size blocks, each with its own RNG stream, so the result does not
/// depend on the number of threads.
ExpectedCostReport expected_cost_monte_carlo(const Instance& inst, const Tour& tour, long long samples,
                                             std::uint64_t seed, int threads = 1);

inline constexpr long long kMonteCarloBlock = 4096;

/// Master-route cost for depot instances: (1 - prod_{v!=d}(1-p)) * master_cost + 2 sum_{v!=d} p(v) c(v,S).
double mr_cost_exact(const Instance& inst, const Subset& s, double master_cost);

/// P[|A|>=2] * master_cost + 2 sum_v p(v) c(v,S) P[some other customer active].
double mr_cost_exact_general(const Instance& inst, const Subset& s, double master_cost);

struct MinMrResult {
    Subset set;
    double cost = 0.0;
};

/// Best master set over all nonempty S (all S containing the depot if there is one),
/// with optimal master tours. Throws InvalidInput for n > 12.
MinMrResult min_mr_bruteforce(const Instance& inst);

struct AprioriOptimum {
    Tour tour;
    double cost = 0.0;
};

/// Optimal a priori tour over all (n-1)!/2 cyclic orders. Throws InvalidInput for n > 9.
AprioriOptimum brute_force_optimum(const Instance& inst);

/// min_mr_bruteforce / brute_force_optimum, with 0/0 = 1.
double empirical_master_route_ratio(const Instance& inst);

/// E_S[MR(S)] where S contains the depot and every other v independently with
/// probability inclusion[v]; MR uses optimal master tours. Depot instances, n <= 20.
double expected_sampled_mr(const Instance& inst, const std::vector<double>& inclusion);

}  // namespace aptsp
