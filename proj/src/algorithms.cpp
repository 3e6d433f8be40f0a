#include "aptsp/algorithms.hpp"

#include "aptsp/errors.hpp"
#include "aptsp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace aptsp {

SamplingPolicy SamplingPolicy::parse(const std::string& text) {
    SamplingPolicy p;
    if (text == "identity") {
        p.kind = Kind::identity;
        p.sigma = 1.0;
        return p;
    }
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    if (head == "power") p.kind = Kind::power;
    else if (head == "scaled") p.kind = Kind::scaled;
    else throw InvalidInput("unknown sampling policy '" + text + "' (identity | power:SIGMA | scaled:SIGMA)");
    if (colon == std::string::npos) throw InvalidInput("policy '" + text + "' needs a parameter, e.g. " + head + ":0.663");
    const std::string arg = text.substr(colon + 1);
    std::size_t used = 0;
    try {
        p.sigma = std::stod(arg, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != arg.size()) throw InvalidInput("malformed policy parameter '" + arg + "'");
    if (!(p.sigma > 0.0 && p.sigma <= 1.0)) throw InvalidInput("policy parameter must lie in (0, 1]");
    return p;
}

std::string SamplingPolicy::to_string() const {
    if (kind == Kind::identity) return "identity";
    std::ostringstream os;
    os << (kind == Kind::power ? "power:" : "scaled:") << sigma;
    return os.str();
}

double SamplingPolicy::operator()(double p) const {
    if (p >= 1.0) return 1.0;
    switch (kind) {
        case Kind::identity: return p;
        case Kind::power: return -std::expm1(sigma * std::log1p(-p));
        case Kind::scaled: return sigma * p;
    }
    return p;
}

Subset sample_master_set(const Instance& inst, const SamplingPolicy& policy, std::uint64_t seed) {
    const auto d = inst.depot();
    if (!d) throw InvalidInput("the sampling algorithm needs a depot");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Subset s;
    for (int v = 0; v < inst.size(); ++v) {
        if (v == *d) {
            s.push_back(v);
            continue;
        }
        if (unit(rng) < policy(inst.prob(v))) s.push_back(v);
    }
    return s;
}

MasterRouteTour build_master_route_tour(const Instance& inst, const Subset& s, TspKind tsp) {
    if (s.empty()) throw InvalidInput("master set is empty");
    const int n = inst.size();
    std::vector<char> member(n, 0);
    for (int v : s) {
        if (v < 0 || v >= n) throw InvalidInput("master set entry out of range");
        member[v] = 1;
    }
    const TspResult master = solve_tsp(inst, s, tsp);
    MasterRouteTour out;
    out.solution.master_set = s;
    out.solution.master_tour = master.tour;
    out.solution.master_cost = master.cost;
    out.solution.hub.assign(n, -1);
    std::vector<std::vector<int>> assigned(n);
    for (int v = 0; v < n; ++v) {
        if (member[v]) {
            out.solution.hub[v] = v;
            continue;
        }
        const int h = nearest_in_set(inst, v, s);
        out.solution.hub[v] = h;
        assigned[h].push_back(v);
    }
    std::vector<int> order;
    order.reserve(n);
    for (int h : master.tour.order()) {
        order.push_back(h);
        auto& list = assigned[h];
        std::sort(list.begin(), list.end(), [&](int a, int b) {
            const double da = inst.dist(h, a), db = inst.dist(h, b);
            return da != db ? da < db : a < b;
        });
        order.insert(order.end(), list.begin(), list.end());
    }
    out.tour = Tour(std::move(order));
    out.tour.check_permutation(n);
    return out;
}

Tour run_sampling_algorithm(const Instance& inst, const SamplingPolicy& policy, TspKind tsp, std::uint64_t seed) {
    return build_master_route_tour(inst, sample_master_set(inst, policy, seed), tsp).tour;
}

int default_n_max(const Instance& inst, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    const double k = inst.total_probability();
    const double ell = std::ceil(std::max(2.0 * std::exp(1.0) * k, 8.0 / epsilon));
    const double bound = 2.0 * k + ell;
    return static_cast<int>(std::min<double>(inst.size(), std::ceil(bound)));
}

namespace {

long long subsets_up_to(int n, int n_max, long long cap) {
    long long total = 0;
    long double binom = 1.0L;  // C(n, s)
    for (int s = 1; s <= n_max; ++s) {
        binom = binom * (n - s + 1) / s;
        if (s >= 2) {
            total += static_cast<long long>(std::llround(binom));
            if (total > cap) return total;
        }
    }
    return total;
}

}  // namespace

LowActivityResult solve_low_activity(const Instance& inst, int n_max) {
    const int n = inst.size();
    if (n < 2) throw InvalidInput("low-activity enumeration needs at least two customers");
    n_max = std::min(n_max, n);
    if (n_max < 2) throw InvalidInput("n_max must be at least 2");
    if (n_max > kHeldKarpLimit) throw BudgetExceeded("n_max exceeds the exact TSP limit of 20");
    const long long count = subsets_up_to(n, n_max, kLowActivitySubsetBudget);
    if (count > kLowActivitySubsetBudget)
        throw BudgetExceeded("low-activity enumeration needs more than 1e7 subsets; lower --n-max");
    LowActivityResult best;
    bool have = false;
    // subsets of each size in lexicographic order
    for (int size = 2; size <= n_max; ++size) {
        std::vector<int> idx(size);
        std::iota(idx.begin(), idx.end(), 0);
        for (;;) {
            const auto built = build_master_route_tour(inst, idx, TspKind::exact);
            const double cost = expected_tour_cost_exact(inst, built.tour);
            ++best.subsets;
            if (!have || cost < best.cost) {
                best.tour = built.tour;
                best.master_set = idx;
                best.cost = cost;
                have = true;
            }
            int i = size - 1;
            while (i >= 0 && idx[i] == n - size + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return best;
}

DepotChoice best_depot_tour(const Instance& inst, const DepotAlgorithm& inner) {
    const int n = inst.size();
    if (n == 0) throw InvalidInput("empty instance");
    DepotChoice best;
    best.candidate_costs.resize(n);
    for (int v = 0; v < n; ++v) {
        const Tour t = inner(inst.with_depot(v));
        const double cost = expected_tour_cost_exact(inst, t);
        best.candidate_costs[v] = cost;
        if (best.depot < 0 || cost < best.cost) {
            best.tour = t;
            best.depot = v;
            best.cost = cost;
        }
    }
    return best;
}

AlgoKind parse_algo_kind(const std::string& text) {
    if (text == "auto") return AlgoKind::automatic;
    if (text == "sampling") return AlgoKind::sampling;
    if (text == "derand") return AlgoKind::derand;
    if (text == "low-activity" || text == "low_activity") return AlgoKind::low_activity;
    throw InvalidInput("unknown algorithm '" + text + "' (auto | sampling | derand | low-activity)");
}

const char* to_string(AlgoKind kind) {
    switch (kind) {
        case AlgoKind::automatic: return "auto";
        case AlgoKind::sampling: return "sampling";
        case AlgoKind::derand: return "derand";
        case AlgoKind::low_activity: return "low-activity";
    }
    return "unknown";
}

double depot_guarantee(AlgoKind depot_algorithm) {
    switch (depot_algorithm) {
        case AlgoKind::sampling: return 3.1;
        case AlgoKind::derand: return 5.9;
        default: throw InvalidInput("depot algorithm must be sampling or derand");
    }
}

namespace {

struct DepotRun {
    Tour tour;
    std::optional<int> master_size;
    std::vector<double> estimator;
};

DepotRun run_depot_algorithm(const Instance& inst, AlgoKind algo, const AprioriConfig& cfg) {
    DepotRun out;
    if (algo == AlgoKind::sampling) {
        const Subset s = sample_master_set(inst, cfg.policy, cfg.seed);
        out.master_size = static_cast<int>(s.size());
        out.tour = build_master_route_tour(inst, s, cfg.tsp).tour;
    } else {
        auto r = derandomized_master_route(inst, cfg.tsp);
        out.master_size = static_cast<int>(r.master_set.size());
        out.tour = std::move(r.tour);
        out.estimator = std::move(r.estimator);
    }
    return out;
}

}  // namespace

AprioriResult solve_apriori(const Instance& inst, double epsilon, const AprioriConfig& cfg) {
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    if (inst.size() == 0) throw InvalidInput("empty instance");
    AprioriResult out;
    auto& tr = out.trace;
    tr.algorithm = to_string(cfg.algo);
    tr.total_probability = inst.total_probability();

    auto low_activity = [&]() {
        const int n_max = cfg.n_max ? *cfg.n_max : default_n_max(inst, epsilon);
        tr.branch = "low-activity";
        tr.n_max = n_max;
        if (inst.size() < 2) {
            out.tour = Tour::identity(inst.size());
            tr.subsets = 0;
            return;
        }
        auto r = solve_low_activity(inst, n_max);
        out.tour = r.tour;
        tr.master_size = static_cast<int>(r.master_set.size());
        tr.subsets = r.subsets;
    };
    auto depot_branch = [&](AlgoKind algo) {
        if (inst.depot()) {
            tr.branch = "depot";
            auto r = run_depot_algorithm(inst, algo, cfg);
            out.tour = std::move(r.tour);
            tr.master_size = r.master_size;
            tr.estimator = std::move(r.estimator);
            return;
        }
        tr.branch = "best-depot";
        std::vector<DepotRun> runs;
        const DepotChoice choice = best_depot_tour(inst, [&](const Instance& with_d) {
            runs.push_back(run_depot_algorithm(with_d, algo, cfg));
            return runs.back().tour;
        });
        out.tour = choice.tour;
        tr.chosen_depot = choice.depot;
        tr.master_size = runs[static_cast<std::size_t>(choice.depot)].master_size;
        tr.estimator = runs[static_cast<std::size_t>(choice.depot)].estimator;
    };

    switch (cfg.algo) {
        case AlgoKind::low_activity: low_activity(); break;
        case AlgoKind::sampling:
        case AlgoKind::derand:
            if (!inst.depot())
                throw InvalidInput(std::string(to_string(cfg.algo)) +
                                   " needs an instance with a depot; use --algo auto for instances without one");
            depot_branch(cfg.algo);
            break;
        case AlgoKind::automatic: {
            const double threshold = 2.0 * depot_guarantee(cfg.depot_algorithm) / epsilon;
            tr.threshold = threshold;
            if (inst.depot()) depot_branch(cfg.depot_algorithm);
            else if (tr.total_probability < threshold) low_activity();
            else depot_branch(cfg.depot_algorithm);
            break;
        }
    }
    out.expected_cost = expected_tour_cost_exact(inst, out.tour);
    return out;
}

namespace {

bool leq(double a, double b) { return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::vector<std::string> normalization_violations(const Instance& original, const NormalizationPlan& plan) {
    std::vector<std::string> out;
    const auto d = original.depot();
    const double eps = plan.epsilon, lam = plan.lambda, sig = plan.sigma;
    if (static_cast<int>(plan.copies.size()) != original.size()) {
        out.push_back("copies vector has the wrong length");
        return out;
    }
    for (int v = 0; v < original.size(); ++v) {
        if (d && v == *d) continue;
        const int k = plan.copies[v];
        const double p = original.prob(v);
        auto fail = [&](int cond, const std::string& what) {
            out.push_back("customer " + std::to_string(v) + " (k=" + std::to_string(k) + "): condition " +
                          std::to_string(cond) + " " + what);
        };
        if (k < 1) {
            fail(0, "k_v >= 1");
            continue;
        }
        const double one_minus_eps_k = std::pow(1.0 - eps, k);
        const double one_minus_seps_k = std::pow(1.0 - sig * eps, k);
        const double one_minus_p_sig = p >= 1.0 ? 0.0 : std::pow(1.0 - p, sig);
        if (!leq(1.0 - one_minus_eps_k, p) || !leq(p, eps * k)) fail(1, "1-(1-eps)^k <= p <= eps k");
        if (!leq(one_minus_p_sig, one_minus_seps_k)) fail(2, "(1-p)^sigma <= (1-sigma eps)^k");
        if (!leq(1.0 - one_minus_p_sig, (1.0 + lam) * (1.0 - one_minus_seps_k)))
            fail(3, "1-(1-p)^sigma <= (1+lambda)(1-(1-sigma eps)^k)");
        if (p < 1.0) {
            if (!leq(one_minus_eps_k, (1.0 + lam) * (1.0 - p))) fail(4, "(1-eps)^k <= (1+lambda)(1-p)");
        } else if (!leq(one_minus_eps_k, lam)) {
            fail(4, "(1-eps)^k <= lambda");
        }
    }
    return out;
}

NormalizedInstance normalize_instance(const Instance& inst, double epsilon, double lambda, double sigma) {
    const auto d = inst.depot();
    if (!d) throw InvalidInput("normalization needs a depot");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw InvalidInput("sigma must lie in (0, 1]");
    NormalizationPlan plan;
    plan.epsilon = epsilon;
    plan.lambda = lambda;
    plan.sigma = sigma;
    const int n = inst.size();
    plan.copies.assign(n, 1);
    for (int v = 0; v < n; ++v) {
        if (v == *d) continue;
        const double p = inst.prob(v);
        double k;
        if (p < 1.0) {
            k = std::floor(std::log1p(-p) / std::log1p(-epsilon));
        } else {
            k = std::ceil(std::max(1.0 / epsilon, std::log(lambda / (1.0 + lambda)) / std::log1p(-sigma * epsilon)));
        }
        if (k > 1e7) throw BudgetExceeded("normalization would create more than 1e7 copies of one customer");
        plan.copies[v] = static_cast<int>(k);
    }
    if (auto bad = normalization_violations(inst, plan); !bad.empty()) {
        std::string msg = "epsilon too large for lambda: " + bad.front();
        if (bad.size() > 1) msg += " (and " + std::to_string(bad.size() - 1) + " more)";
        throw InvalidInput(msg);
    }
    long long total = 0;
    for (int k : plan.copies) total += k;
    if (total > 20000) throw BudgetExceeded("normalized instance would exceed 20000 customers");
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < plan.copies[v]; ++c) plan.projection.push_back(v);
    const int m = static_cast<int>(plan.projection.size());
    std::vector<double> matrix(static_cast<std::size_t>(m) * m);
    std::vector<double> p(m);
    std::optional<int> depot;
    for (int a = 0; a < m; ++a) {
        const int va = plan.projection[a];
        p[a] = va == *d ? 1.0 : epsilon;
        if (va == *d) depot = a;
        for (int b = 0; b < m; ++b) matrix[static_cast<std::size_t>(a) * m + b] = inst.dist(va, plan.projection[b]);
    }
    std::vector<std::string> names;
    if (!inst.names().empty()) {
        std::vector<int> seen(n, 0);
        for (int a = 0; a < m; ++a) {
            const int va = plan.projection[a];
            names.push_back(inst.names()[va] + (plan.copies[va] > 1 ? "#" + std::to_string(seen[va]++) : ""));
        }
    }
    return {Instance(m, std::move(matrix), std::move(p), depot, std::move(names)), std::move(plan)};
}

double conditional_connection_cost(const Instance& inst, const std::vector<char>& in_p,
                                   const std::vector<char>& in_pbar) {
    const int n = inst.size();
    if (static_cast<int>(in_p.size()) != n || static_cast<int>(in_pbar.size()) != n)
        throw InvalidInput("decision vectors must have n entries");
    bool any = false;
    for (int v = 0; v < n; ++v) {
        if (in_p[v] && in_pbar[v]) throw InvalidInput("P and P-bar must be disjoint");
        any = any || in_p[v];
    }
    if (!any) throw InvalidInput("P must be nonempty");
    std::vector<int> cand(n);
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
        if (in_p[v]) continue;
        cand.resize(n);
        std::iota(cand.begin(), cand.end(), 0);
        std::sort(cand.begin(), cand.end(), [&](int a, int b) {
            const double da = inst.dist(v, a), db = inst.dist(v, b);
            return da != db ? da < db : a < b;
        });
        double none_closer = 1.0, expect = 0.0;
        for (int u : cand) {
            if (in_pbar[u]) continue;
            if (in_p[u]) {
                expect += none_closer * inst.dist(v, u);
                break;
            }
            expect += none_closer * inst.prob(u) * inst.dist(v, u);
            none_closer *= 1.0 - inst.prob(u);
        }
        total += 2.0 * inst.prob(v) * expect;
    }
    return total;
}

MasterRouteLp solve_master_route_lp(const Instance& inst) {
    const auto d = inst.depot();
    if (!d) throw InvalidInput("master-route-solution LP needs a depot");
    const int n = inst.size();
    MasterRouteLp out;
    out.rented_cost.assign(n, 0.0);
    out.b.assign(static_cast<std::size_t>(n) * n, 0.0);
    double none = 1.0;
    for (int v = 0; v < n; ++v)
        if (v != *d) none *= 1.0 - inst.prob(v);
    out.q = 1.0 - none;
    if (n < 2) return out;

    std::vector<std::pair<int, int>> edges;
    std::vector<int> edge_id(static_cast<std::size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            edge_id[static_cast<std::size_t>(i) * n + j] = edge_id[static_cast<std::size_t>(j) * n + i] =
                static_cast<int>(edges.size());
            edges.emplace_back(i, j);
        }
    const int m = static_cast<int>(edges.size());
    std::vector<int> customers;
    for (int v = 0; v < n; ++v)
        if (v != *d) customers.push_back(v);
    const int c = static_cast<int>(customers.size());
    // variables: b_e, then r^v_e for each customer slot
    CoveringLp lp;
    lp.cost.resize(static_cast<std::size_t>(m) * (c + 1));
    for (int e = 0; e < m; ++e) {
        const double ce = inst.dist(edges[e].first, edges[e].second);
        lp.cost[e] = out.q * ce;
        for (int s = 0; s < c; ++s) lp.cost[static_cast<std::size_t>(m) * (s + 1) + e] = inst.prob(customers[s]) * ce;
    }
    auto add_cut = [&](int slot, const std::vector<char>& in_u) {
        std::vector<LpTerm> row;
        for (int e = 0; e < m; ++e)
            if (in_u[edges[e].first] != in_u[edges[e].second]) {
                row.push_back({e, 1.0});
                row.push_back({m * (slot + 1) + e, 1.0});
            }
        std::sort(row.begin(), row.end(), [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(2.0);
        ++out.cuts;
    };
    for (int s = 0; s < c; ++s) {
        std::vector<char> u(n, 0);
        u[customers[s]] = 1;
        add_cut(s, u);
    }
    CoveringSolution sol;
    for (;;) {
        if (++out.rounds > 10000) throw NumericalFailure("master-route-solution LP did not converge");
        sol = solve_covering_lp(lp);
        bool added = false;
        for (int s = 0; s < c; ++s) {
            std::vector<double> cap(static_cast<std::size_t>(n) * n, 0.0);
            for (int e = 0; e < m; ++e) {
                const double y = sol.x[e] + sol.x[static_cast<std::size_t>(m) * (s + 1) + e];
                cap[static_cast<std::size_t>(edges[e].first) * n + edges[e].second] = y;
                cap[static_cast<std::size_t>(edges[e].second) * n + edges[e].first] = y;
            }
            const MinCut cut = min_st_cut(cap, n, customers[s], *d);
            if (cut.value < 2.0 - kCutTolerance) {
                add_cut(s, cut.source_side);
                added = true;
            }
        }
        if (!added) break;
    }
    out.value = sol.value;
    for (int e = 0; e < m; ++e) {
        const auto [i, j] = edges[e];
        const double ce = inst.dist(i, j);
        out.b[static_cast<std::size_t>(i) * n + j] = out.b[static_cast<std::size_t>(j) * n + i] = sol.x[e];
        out.bought_cost += ce * sol.x[e];
        for (int s = 0; s < c; ++s) out.rented_cost[customers[s]] += ce * sol.x[static_cast<std::size_t>(m) * (s + 1) + e];
    }
    return out;
}

double subtour_lp_factor(TspKind tsp) {
    // exact tours and Christofides tours both cost at most 1.5 times the subtour LP value
    return tsp == TspKind::double_tree ? 2.0 : 1.5;
}

DerandResult derandomized_master_route(const Instance& inst, TspKind tsp) {
    const auto d = inst.depot();
    if (!d) throw InvalidInput("the derandomized algorithm needs a depot");
    const int n = inst.size();
    DerandResult out;
    out.lp = solve_master_route_lp(inst);
    const double alpha = subtour_lp_factor(tsp);
    std::vector<char> in_p(n, 0), in_pbar(n, 0);
    in_p[*d] = 1;

    auto estimate = [&]() {
        int size_p = 0;
        double none_undecided = 1.0, master = 0.0;
        for (int v = 0; v < n; ++v) {
            if (in_p[v]) ++size_p;
            if (v == *d) continue;
            if (in_p[v]) master += out.lp.rented_cost[v];
            else if (!in_pbar[v]) {
                master += inst.prob(v) * out.lp.rented_cost[v];
                none_undecided *= 1.0 - inst.prob(v);
            }
        }
        const double q = size_p >= 2 ? 1.0 : 1.0 - none_undecided;
        master += q * out.lp.bought_cost;
        return conditional_connection_cost(inst, in_p, in_pbar) + alpha * master;
    };

    double current = estimate();
    out.estimator.push_back(current);
    for (int v = 0; v < n; ++v) {
        if (v == *d) continue;
        in_p[v] = 1;
        const double with = estimate();
        in_p[v] = 0;
        in_pbar[v] = 1;
        const double without = estimate();
        in_pbar[v] = 0;
        if (with <= without) in_p[v] = 1;
        else in_pbar[v] = 1;
        const double next = std::min(with, without);
        if (next > current + 1e-9 * std::max(1.0, std::abs(current))) {
            std::ostringstream os;
            os.precision(17);
            os << "pessimistic estimator increased from " << current << " to " << next << " at customer " << v;
            throw NumericalFailure(os.str());
        }
        current = next;
        out.estimator.push_back(current);
    }
    for (int v = 0; v < n; ++v)
        if (in_p[v]) out.master_set.push_back(v);
    out.tour = build_master_route_tour(inst, out.master_set, tsp).tour;
    return out;
}

}  // namespace aptsp
