#pragma once

#include "aptsp/instance.hpp"

#include <string>
#include <tuple>
#include <vector>

namespace aptsp {

enum class TspKind { exact, christofides, double_tree };

TspKind parse_tsp_kind(const std::string& text);
const char* to_string(TspKind kind);

struct TspResult {
    Tour tour;  ///< visiting order of the subset members (customer indices)
    double cost = 0.0;
    double guarantee = 1.0;
    std::string method;  ///< code path actually taken
};

inline constexpr int kHeldKarpLimit = 20;

/// Exact optimum by bitmask DP. Throws BudgetExceeded above kHeldKarpLimit nodes.
TspResult held_karp(const Instance& inst, const Subset& subset);
/// Prim MST, preorder walk with children visited in ascending index order.
TspResult double_tree(const Instance& inst, const Subset& subset);
/// MST + min-weight perfect matching on odd vertices + Euler shortcut. The
/// matching is exact (subset DP) for up to 20 odd vertices; beyond that a
/// greedy matching is used and the cheaper of that tour and the double tree
/// is returned with guarantee 2.
TspResult christofides(const Instance& inst, const Subset& subset);

TspResult solve_tsp(const Instance& inst, const Subset& subset, TspKind kind);

/// Minimum spanning tree weight over the subset.
double mst_cost(const Instance& inst, const Subset& subset);

struct MinCut {
    double value = 0.0;
    std::vector<char> source_side;  ///< per node of the flow network
};

/// Minimum s-t cut of an undirected network given by a dense symmetric capacity matrix.
MinCut min_st_cut(const std::vector<double>& capacity, int n, int s, int t);

struct SubtourLpResult {
    double value = 0.0;
    std::vector<std::tuple<int, int, double>> edges;  ///< (u, v, y_uv) with y > 0, customer indices
    int cuts = 0;
    int rounds = 0;
};

inline constexpr double kCutTolerance = 1e-7;

/// Subtour-elimination LP value over the subset by cutting planes.
SubtourLpResult subtour_lp_value(const Instance& inst, const Subset& subset);

}  // namespace aptsp
