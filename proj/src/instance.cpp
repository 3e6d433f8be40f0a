#include "aptsp/instance.hpp"

#include "aptsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace aptsp {

Instance::Instance(int n, std::vector<double> matrix, std::vector<double> p, std::optional<int> depot,
                   std::vector<std::string> names)
    : n_(n), matrix_(std::move(matrix)), p_(std::move(p)), depot_(depot), names_(std::move(names)) {
    if (n < 1) throw InvalidInput("instance needs at least one customer");
    if (matrix_.size() != static_cast<std::size_t>(n) * n)
        throw InvalidInput("distance matrix must be n x n");
    if (p_.size() != static_cast<std::size_t>(n)) throw InvalidInput("probability vector must have n entries");
    if (depot_ && (*depot_ < 0 || *depot_ >= n)) throw InvalidInput("depot index out of range");
    if (!names_.empty() && names_.size() != static_cast<std::size_t>(n))
        throw InvalidInput("names must have n entries when given");
}

double Instance::total_probability() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

Instance Instance::with_depot(int v) const {
    if (v < 0 || v >= n_) throw InvalidInput("depot index out of range");
    auto p = p_;
    p[v] = 1.0;
    return Instance(n_, matrix_, std::move(p), v, names_);
}

Instance Instance::with_probs(std::vector<double> p) const {
    std::optional<int> depot = depot_;
    if (depot && p.size() == p_.size() && p[*depot] != 1.0) depot.reset();
    return Instance(n_, matrix_, std::move(p), depot, names_);
}

Tour::Tour(std::vector<int> order) : order_(std::move(order)) {}

void Tour::check_permutation(int n) const {
    if (static_cast<int>(order_.size()) != n) {
        std::ostringstream os;
        os << "tour has " << order_.size() << " entries, instance has " << n << " customers";
        throw InvalidInput(os.str());
    }
    std::vector<char> seen(n, 0);
    for (int v : order_) {
        if (v < 0 || v >= n) throw InvalidInput("tour entry out of range");
        if (seen[v]) throw InvalidInput("tour visits a customer twice");
        seen[v] = 1;
    }
}

Tour Tour::identity(int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return Tour(std::move(order));
}

ValidationReport validate_instance(const Instance& inst, MetricMode mode) {
    ValidationReport report;
    const int n = inst.size();
    auto add = [&](std::string kind, std::vector<int> witness, double amount, std::string msg) {
        report.violations.push_back({std::move(kind), std::move(witness), amount, std::move(msg)});
    };
    for (int u = 0; u < n; ++u) {
        if (inst.dist(u, u) != 0.0) add("diagonal", {u}, inst.dist(u, u), "nonzero diagonal entry");
        for (int v = u + 1; v < n; ++v) {
            const double a = inst.dist(u, v), b = inst.dist(v, u);
            if (!std::isfinite(a) || !std::isfinite(b)) {
                add("negative", {u, v}, 0.0, "non-finite distance");
                continue;
            }
            if (std::abs(a - b) > kTriangleTolerance) add("asymmetry", {u, v}, std::abs(a - b), "matrix not symmetric");
            if (a < 0.0 || b < 0.0) add("negative", {u, v}, std::min(a, b), "negative distance");
            if (mode == MetricMode::strict && (a == 0.0 || b == 0.0))
                add("zero_distance", {u, v}, 0.0, "distinct customers at distance zero");
        }
    }
    for (int u = 0; u < n; ++u)
        for (int w = 0; w < n; ++w) {
            if (w == u) continue;
            for (int v = 0; v < n; ++v) {
                if (v == u || v == w) continue;
                const double excess = inst.dist(u, w) - inst.dist(u, v) - inst.dist(v, w);
                if (excess > kTriangleTolerance && u < w) {
                    std::ostringstream os;
                    os << "c(" << u << "," << w << ") exceeds path through " << v << " by " << excess;
                    add("triangle", {u, v, w}, excess, os.str());
                }
            }
        }
    for (int v = 0; v < n; ++v) {
        const double p = inst.prob(v);
        if (!(p > 0.0 && p <= 1.0)) add("probability", {v}, p, "activation probability outside (0,1]");
    }
    if (auto d = inst.depot(); d && inst.prob(*d) != 1.0)
        add("depot", {*d}, inst.prob(*d), "depot must have activation probability 1");
    return report;
}

double cycle_cost(const Instance& inst, std::span<const int> order) {
    const std::size_t k = order.size();
    if (k < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) total += inst.dist(order[i], order[i + 1]);
    total += inst.dist(order[k - 1], order[0]);
    return total;
}

double shortcut_cost(const Instance& inst, const Tour& tour, const ActiveSet& active) {
    std::vector<char> on(inst.size(), 0);
    for (int v : active.members) {
        if (v < 0 || v >= inst.size()) throw InvalidInput("active customer out of range");
        on[v] = 1;
    }
    std::vector<int> visited;
    visited.reserve(active.members.size());
    for (int v : tour.order())
        if (on[v]) visited.push_back(v);
    return cycle_cost(inst, visited);
}

double shortcut_cost_mask(const Instance& inst, const Tour& tour, std::uint64_t mask) {
    int first = -1, prev = -1;
    double total = 0.0;
    int count = 0;
    for (int v : tour.order()) {
        if (!((mask >> v) & 1U)) continue;
        if (first < 0) first = v;
        else total += inst.dist(prev, v);
        prev = v;
        ++count;
    }
    if (count < 2) return 0.0;
    return total + inst.dist(prev, first);
}

double dist_to_set(const Instance& inst, int v, std::span<const int> s) {
    if (s.empty()) throw std::invalid_argument("dist_to_set: empty set");
    double best = inst.dist(v, s[0]);
    for (int u : s) best = std::min(best, inst.dist(v, u));
    return best;
}

int nearest_in_set(const Instance& inst, int v, std::span<const int> s) {
    if (s.empty()) throw std::invalid_argument("nearest_in_set: empty set");
    int best = -1;
    double best_d = 0.0;
    for (int u : s) {
        const double d = inst.dist(v, u);
        if (best < 0 || d < best_d || (d == best_d && u < best)) {
            best = u;
            best_d = d;
        }
    }
    return best;
}

Subset subset_from_mask(std::uint64_t mask, int n) {
    Subset s;
    for (int v = 0; v < n; ++v)
        if ((mask >> v) & 1U) s.push_back(v);
    return s;
}

std::uint64_t mask_from_subset(std::span<const int> s) {
    std::uint64_t m = 0;
    for (int v : s) m |= std::uint64_t{1} << v;
    return m;
}

Instance uniform_metric(int n, std::vector<double> p, std::optional<int> depot) {
    std::vector<double> m(static_cast<std::size_t>(n) * n, 1.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = 0.0;
    return Instance(n, std::move(m), std::move(p), depot);
}

Instance cycle_metric(int n, std::vector<double> p, std::optional<int> depot) {
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int k = std::abs(i - j);
            m[static_cast<std::size_t>(i) * n + j] = std::min(k, n - k);
        }
    return Instance(n, std::move(m), std::move(p), depot);
}

Instance euclidean_instance(std::span<const std::pair<double, double>> points, std::vector<double> p,
                            std::optional<int> depot) {
    const int n = static_cast<int>(points.size());
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                m[static_cast<std::size_t>(i) * n + j] =
                    std::hypot(points[i].first - points[j].first, points[i].second - points[j].second);
    return Instance(n, std::move(m), std::move(p), depot);
}

}  // namespace aptsp
