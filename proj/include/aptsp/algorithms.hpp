#pragma once

#include "aptsp/evaluation.hpp"
#include "aptsp/instance.hpp"
#include "aptsp/tsp.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aptsp {

/// Inclusion probability f(p) for the sampled master set.
struct SamplingPolicy {
    enum class Kind { identity, power, scaled };
    Kind kind = Kind::power;
    double sigma = 0.663;

    /// "identity", "power:0.663" or "scaled:0.5".
    static SamplingPolicy parse(const std::string& text);
    std::string to_string() const;
    double operator()(double p) const;
};

/// Depot always included; every other v independently with probability f(p(v)),
/// drawn in index order from mt19937_64(seed).
Subset sample_master_set(const Instance& inst, const SamplingPolicy& policy, std::uint64_t seed);

struct MasterRouteTour {
    Tour tour;
    MasterRouteSolution solution;
};

/// Follows the master tour over s; right after each hub, visits the customers assigned
/// to it in ascending (distance, index) order.
MasterRouteTour build_master_route_tour(const Instance& inst, const Subset& s, TspKind tsp);

Tour run_sampling_algorithm(const Instance& inst, const SamplingPolicy& policy, TspKind tsp, std::uint64_t seed);

inline constexpr long long kLowActivitySubsetBudget = 10'000'000;

/// Subset-size cap N(k, eps/4) with k = sum of p: 2k + ceil(max(2ek, 8/eps)), capped at n.
int default_n_max(const Instance& inst, double epsilon);

struct LowActivityResult {
    Tour tour;
    Subset master_set;
    double cost = 0.0;
    long long subsets = 0;
};

/// Enumerates all S with 2 <= |S| <= n_max and keeps the master-route tour with the
/// lowest exact expected cost (first found on ties). Throws BudgetExceeded above
/// kLowActivitySubsetBudget subsets.
LowActivityResult solve_low_activity(const Instance& inst, int n_max);

using DepotAlgorithm = std::function<Tour(const Instance&)>;

struct DepotChoice {
    Tour tour;
    int depot = -1;
    double cost = 0.0;                ///< on the original instance
    std::vector<double> candidate_costs;
};

/// Runs inner with each customer in turn made the depot and returns the candidate
/// that is cheapest on the original instance (lowest depot index on ties).
DepotChoice best_depot_tour(const Instance& inst, const DepotAlgorithm& inner);

enum class AlgoKind { automatic, sampling, derand, low_activity };

AlgoKind parse_algo_kind(const std::string& text);
const char* to_string(AlgoKind kind);

struct AprioriConfig {
    AlgoKind algo = AlgoKind::automatic;
    AlgoKind depot_algorithm = AlgoKind::sampling;  ///< inner algorithm of the auto dispatch
    SamplingPolicy policy{};
    TspKind tsp = TspKind::exact;
    std::uint64_t seed = 0;
    std::optional<int> n_max;
};

/// rho-hat of the configured depot algorithm: 3.1 for sampling, 5.9 for derand.
double depot_guarantee(AlgoKind depot_algorithm);

struct AlgorithmTrace {
    std::string algorithm;
    std::string branch;  ///< "depot", "low-activity", "best-depot"
    double total_probability = 0.0;
    std::optional<double> threshold;
    std::optional<int> master_size;
    std::optional<int> chosen_depot;
    std::optional<long long> subsets;
    std::optional<int> n_max;
    std::vector<double> estimator;  ///< derandomization trajectory
};

struct AprioriResult {
    Tour tour;
    double expected_cost = 0.0;
    AlgorithmTrace trace;
};

/// Dispatch of the general algorithm: low activity (sum p < 2 rho / eps) goes to
/// solve_low_activity, otherwise the depot algorithm runs (wrapped in best_depot_tour
/// when the instance has no depot). Explicit algorithms bypass the dispatch.
AprioriResult solve_apriori(const Instance& inst, double epsilon, const AprioriConfig& cfg);

inline constexpr double kDefaultNormalizationSigma = 0.663;

struct NormalizationPlan {
    double epsilon = 0.0;
    double lambda = 0.0;
    double sigma = kDefaultNormalizationSigma;
    std::vector<int> copies;      ///< k_v per original customer (1 for the depot)
    std::vector<int> projection;  ///< new index -> original index
};

struct NormalizedInstance {
    Instance instance;
    NormalizationPlan plan;
};

/// Failed conditions of the plan for customer v; empty when all four hold.
std::vector<std::string> normalization_violations(const Instance& original, const NormalizationPlan& plan);

/// Replaces each non-depot customer by k_v copies at distance 0 with probability epsilon.
/// Throws InvalidInput if some k_v violates a condition (epsilon too large).
NormalizedInstance normalize_instance(const Instance& inst, double epsilon, double lambda,
                                      double sigma = kDefaultNormalizationSigma);

/// Sum over v of 2 p(v) E[c(v,S) | P subset S subset V \ Pbar], undecided customers in S with probability p.
double conditional_connection_cost(const Instance& inst, const std::vector<char>& in_p, const std::vector<char>& in_pbar);

struct MasterRouteLp {
    double value = 0.0;
    double q = 0.0;                      ///< P[some customer other than the depot is active]
    double bought_cost = 0.0;            ///< sum_e c(e) b_e
    std::vector<double> rented_cost;     ///< per customer: sum_e c(e) r_e^v (0 for the depot)
    std::vector<double> b;               ///< dense n x n, symmetric
    int rounds = 0;
    int cuts = 0;
};

/// Master-Route-Solution-LP by cutting planes (min v-d cuts under b + r^v).
MasterRouteLp solve_master_route_lp(const Instance& inst);

/// Factor relating the TSP solver's tour to the subtour LP value.
double subtour_lp_factor(TspKind tsp);

struct DerandResult {
    Tour tour;
    Subset master_set;
    std::vector<double> estimator;  ///< initial value, then one entry per decision
    MasterRouteLp lp;
};

/// Conditional-expectation derandomization; throws NumericalFailure if the estimator increases.
DerandResult derandomized_master_route(const Instance& inst, TspKind tsp);

}  // namespace aptsp
