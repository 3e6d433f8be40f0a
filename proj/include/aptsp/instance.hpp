#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aptsp {

/// Sorted list of distinct customer indices.
using Subset = std::vector<int>;

/// Finite (semi-)metric space with independent activation probabilities.
///
/// The distance matrix is stored densely in row-major order. Construction
/// only checks shapes; metric properties are checked by validate_instance()
/// so that violations can be reported as data.
class Instance {
public:
    Instance() = default;
    Instance(int n, std::vector<double> matrix, std::vector<double> p,
             std::optional<int> depot = std::nullopt, std::vector<std::string> names = {});

    int size() const noexcept { return n_; }
    double dist(int u, int v) const noexcept { return matrix_[static_cast<std::size_t>(u) * n_ + v]; }
    double prob(int v) const noexcept { return p_[v]; }
    std::span<const double> probs() const noexcept { return p_; }
    std::span<const double> matrix() const noexcept { return matrix_; }
    std::optional<int> depot() const noexcept { return depot_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    double total_probability() const;

    /// Copy with p(v) = 1 and v declared the depot.
    Instance with_depot(int v) const;
    /// Copy with a different probability vector (depot kept only if still p = 1).
    Instance with_probs(std::vector<double> p) const;

private:
    int n_ = 0;
    std::vector<double> matrix_;
    std::vector<double> p_;
    std::optional<int> depot_;
    std::vector<std::string> names_;
};

/// Cyclic visiting order of all customers.
class Tour {
public:
    Tour() = default;
    explicit Tour(std::vector<int> order);

    /// Throws InvalidInput unless the order is a permutation of 0..n-1.
    void check_permutation(int n) const;

    const std::vector<int>& order() const noexcept { return order_; }
    int size() const noexcept { return static_cast<int>(order_.size()); }

    static Tour identity(int n);

private:
    std::vector<int> order_;
};

/// Set of active customers.
struct ActiveSet {
    Subset members;
};

enum class MetricMode {
    semi,    ///< zero off-diagonal distances allowed
    strict,  ///< distinct customers must have positive distance
};

struct Violation {
    std::string kind;  ///< "asymmetry", "negative", "diagonal", "triangle", "zero_distance", "probability", "depot"
    std::vector<int> witness;
    double amount = 0.0;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

inline constexpr double kTriangleTolerance = 1e-9;

ValidationReport validate_instance(const Instance& inst, MetricMode mode = MetricMode::semi);

/// Cost of the tour shortcut to the active customers; 0 when fewer than two are active.
double shortcut_cost(const Instance& inst, const Tour& tour, const ActiveSet& active);
/// Same, with activity given as a bitmask over customer indices (n <= 64).
double shortcut_cost_mask(const Instance& inst, const Tour& tour, std::uint64_t mask);

/// Full cycle cost of an order over a subset of customers (0 for fewer than 2, 2c for 2).
double cycle_cost(const Instance& inst, std::span<const int> order);

/// Distance from v to the nearest member of s. Throws std::invalid_argument on empty s.
double dist_to_set(const Instance& inst, int v, std::span<const int> s);
/// Nearest member of s, lowest index on ties. Throws std::invalid_argument on empty s.
int nearest_in_set(const Instance& inst, int v, std::span<const int> s);

Subset subset_from_mask(std::uint64_t mask, int n);
std::uint64_t mask_from_subset(std::span<const int> s);

// Instance factories.
Instance uniform_metric(int n, std::vector<double> p, std::optional<int> depot = std::nullopt);
Instance cycle_metric(int n, std::vector<double> p, std::optional<int> depot = std::nullopt);
Instance euclidean_instance(std::span<const std::pair<double, double>> points, std::vector<double> p,
                            std::optional<int> depot = std::nullopt);

}  // namespace aptsp
