#include "aptsp/bounds.hpp"

#include "aptsp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

namespace aptsp {

void SamplingLpConfig::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0) throw InvalidInput("alpha must be a nonnegative number");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw InvalidInput("sigma must lie in (0, 1]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be positive");
    if (n_buckets < 1) throw InvalidInput("N must be at least 1");
}

void MrrLpConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be positive");
    if (n_buckets < 1) throw InvalidInput("N must be at least 1");
    if (a < 1 || a % 2 == 0) throw InvalidInput("a must be a positive odd integer");
    if (!h.empty()) {
        if (static_cast<int>(h.size()) != n_buckets) throw InvalidInput("h must have N entries");
        for (int v : h)
            if (v < 0 || v >= a) throw InvalidInput("offsets h_i must lie in {0, ..., a-1}");
    }
}

int MrrLpConfig::offset(int i) const { return h.empty() ? i % a : h[static_cast<std::size_t>(i - 1)]; }

int MrrLpConfig::j_max(int i) const { return (offset(i) + i + 1 + a - 1) / a; }

double geometric_tail_closed(int n, double q) {
    const double one_minus_q = 1.0 - q;
    return std::pow(q, n) * (1.0 + n * one_minus_q) / (one_minus_q * one_minus_q);
}

DeltaTerms delta_terms_series(const SamplingLpConfig& cfg) {
    cfg.validate();
    const long double x = static_cast<long double>(cfg.sigma) * cfg.beta;
    const long double beta = cfg.beta;
    const int n = cfg.n_buckets;
    long double s1 = 0.0L, s2 = 0.0L;
    const long double horizon = n + 1.0L / x;
    for (long k = n + 1;; ++k) {
        const long double t1 = expl(-static_cast<long double>(k) * x);
        const long double t2 = static_cast<long double>(k) * expl(-static_cast<long double>(k - 1) * x);
        s1 += t1;
        s2 += t2;
        if (k > horizon && t2 <= s2 * 1e-21L && t1 <= s1 * 1e-21L) break;
        if (t1 == 0.0L && t2 == 0.0L) break;
    }
    DeltaTerms d;
    const long double d1 = 4.0L * beta * s1;
    d.delta1 = static_cast<double>(d1);
    d.delta2 = static_cast<double>((static_cast<long double>(cfg.alpha) + d1 / 2.0L) * s2);
    return d;
}

DeltaTerms compute_delta_terms(const SamplingLpConfig& cfg) {
    cfg.validate();
    const double x = cfg.sigma * cfg.beta;
    const double n = cfg.n_buckets;
    const double denom = std::exp(n * x) * std::expm1(x);  // e^{N sigma beta}(e^{sigma beta} - 1)
    const double one_minus_q = -std::expm1(-x);            // 1 - e^{-sigma beta}
    DeltaTerms d;
    d.delta1 = 4.0 * cfg.beta / denom;
    d.delta2 = (cfg.alpha + 2.0 * cfg.beta / denom) * std::exp(-n * x) / (one_minus_q * one_minus_q) *
               (1.0 + n * one_minus_q);
    const DeltaTerms s = delta_terms_series(cfg);
    auto rel = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
    };
    if (rel(d.delta1, s.delta1) > 1e-12 || rel(d.delta2, s.delta2) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "delta terms: closed form (" << d.delta1 << ", " << d.delta2 << ") disagrees with series (" << s.delta1
           << ", " << s.delta2 << ")";
        throw NumericalFailure(os.str());
    }
    return d;
}

std::string index_name(int i) { return i < 0 ? "m" + std::to_string(-i) : std::to_string(i); }

double bound_from_primal(double value) {
    if (!(value > 0.0)) throw InvalidInput("bound needs a positive primal value");
    return 1.0 / value;
}

namespace {

void compact(std::vector<LpTerm>& terms) {
    std::sort(terms.begin(), terms.end(), [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (out > 0 && terms[out - 1].var == terms[i].var) terms[out - 1].coef += terms[i].coef;
        else terms[out++] = terms[i];
    }
    terms.resize(out);
    terms.erase(std::remove_if(terms.begin(), terms.end(), [](const LpTerm& t) { return t.coef == 0.0; }), terms.end());
}

std::string pair_name(const char* prefix, int i, int j) {
    return std::string(prefix) + "_" + index_name(i) + "_" + index_name(j);
}

// Pairs 0 <= i <= j <= N, enumerated i-major.
struct PairIndex {
    int n;  // N
    explicit PairIndex(int n_) : n(n_) {}
    std::size_t count() const { return static_cast<std::size_t>(n + 1) * (n + 2) / 2; }
    std::size_t operator()(int i, int j) const {
        return static_cast<std::size_t>(i) * (n + 1) - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
    }
};

// Triangle pairs 1 <= i <= j, i + j <= N, enumerated i-major.
std::vector<PairKey> triangle_pairs(int n) {
    std::vector<PairKey> out;
    for (int i = 1; 2 * i <= n; ++i)
        for (int j = i; i + j <= n; ++j) out.emplace_back(i, j);
    return out;
}

struct SamplingCoefficients {
    std::vector<double> g;    // master coefficient of B_k
    std::vector<double> a;    // 4 beta e^{-(s-1) sigma beta} indexed by s = i + j
    std::vector<double> c;    // objective e^{-(k+1/2) beta}
    double rhs = 0.0;         // sigma^-2
};

SamplingCoefficients sampling_coefficients(const SamplingLpConfig& cfg) {
    cfg.validate();
    const DeltaTerms d = compute_delta_terms(cfg);
    const int n = cfg.n_buckets;
    const double x = cfg.sigma * cfg.beta;
    SamplingCoefficients out;
    out.g.resize(n + 1);
    out.c.resize(n + 1);
    out.a.resize(2 * n + 1);
    for (int k = 0; k <= n; ++k) {
        out.g[k] = (cfg.alpha + d.delta1) * std::exp(-(k - 1) * x) + (k == 1 ? d.delta2 : 0.0);
        out.c[k] = std::exp(-(k + 0.5) * cfg.beta);
    }
    for (int s = 0; s <= 2 * n; ++s) out.a[s] = 4.0 * cfg.beta * std::exp(-(s - 1) * x);
    out.rhs = 1.0 / (cfg.sigma * cfg.sigma);
    return out;
}

std::vector<double> objective_weights(double beta, int n) {
    std::vector<double> c(n + 1);
    for (int k = 0; k <= n; ++k) c[k] = std::exp(-(k + 0.5) * beta);
    return c;
}

// Dual variable layout of the Sampling dual: x pairs, y, v pairs, w pairs.
struct SamplingDualLayout {
    int n;
    std::vector<PairKey> tri;
    PairIndex pairs;
    explicit SamplingDualLayout(int n_) : n(n_), tri(triangle_pairs(n_)), pairs(n_) {}
    int y() const { return static_cast<int>(tri.size()); }
    int v(int i, int j) const { return y() + 1 + static_cast<int>(pairs(i, j)); }
    int w(int i, int j) const { return y() + 1 + static_cast<int>(pairs.count() + pairs(i, j)); }
    int size() const { return y() + 1 + static_cast<int>(2 * pairs.count()); }
};

struct MrrPair {
    int j, i, first, second;
};

struct MrrLayout {
    int n, a;
    std::vector<MrrPair> pairs;                 // (j, i) i-major
    std::vector<std::vector<int>> first_of, second_of;  // per k + a: pair ids
    explicit MrrLayout(const MrrLpConfig& cfg) : n(cfg.n_buckets), a(cfg.a) {
        first_of.resize(n + a + 1);
        second_of.resize(n + a + 1);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= cfg.j_max(i); ++j) {
                const int p = cfg.first_index(j, i), q = cfg.second_index(j, i);
                if (p < -a || p > n || q < -a || q > n) throw NumericalFailure("bucket interval index out of range");
                first_of[p + a].push_back(static_cast<int>(pairs.size()));
                second_of[q + a].push_back(static_cast<int>(pairs.size()));
                pairs.push_back({j, i, p, q});
            }
    }
    int lo(int k) const { return std::max(k, 0); }
    int hi(int k) const { return std::min(k + a, n); }
    // primal layout: B_0..B_N, A_{-a}..A_N, M pairs
    int pB(int i) const { return i; }
    int pA(int k) const { return n + 1 + k + a; }
    int pM(int id) const { return n + 1 + n + a + 1 + id; }
    int primal_size() const { return pM(static_cast<int>(pairs.size())); }
    // dual layout: x_2..x_N, y_1..y_N, v pairs, w pairs, z_{-a}..z_N
    int dx(int i) const { return i - 2; }
    int dy(int i) const { return (n - 1) + i - 1; }
    int dv(int id) const { return (n - 1) + n + id; }
    int dw(int id) const { return (n - 1) + n + static_cast<int>(pairs.size()) + id; }
    int dz(int k) const { return (n - 1) + n + 2 * static_cast<int>(pairs.size()) + k + a; }
    int dual_size() const { return dz(n + 1); }
};

}  // namespace

void emit_sampling_lp(const SamplingLpConfig& cfg, LpBuilder& out) {
    const auto co = sampling_coefficients(cfg);
    const int n = cfg.n_buckets;
    const PairIndex pidx(n);
    out.set_sense(Sense::minimize);
    for (int i = 0; i <= n; ++i) out.add_variable("B_" + index_name(i), co.c[i]);
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) out.add_variable(pair_name("M", i, j), 0.0);
    const int mbase = n + 1;
    std::vector<LpTerm> row;
    row.reserve(pidx.count() + n + 1);
    for (int k = 0; k <= n; ++k) row.push_back({k, co.g[k]});
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) row.push_back({mbase + static_cast<int>(pidx(i, j)), co.a[i + j]});
    out.add_row("master", row, Relation::ge, co.rhs);
    for (const auto& [i, j] : triangle_pairs(n)) {
        row = {{i, 1.0}, {j, 1.0}, {i + j, -1.0}};
        compact(row);
        out.add_row(pair_name("tri", i, j), row, Relation::ge, 0.0);
    }
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const int m = mbase + static_cast<int>(pidx(i, j));
            row = {{i, 1.0}, {m, -1.0}};
            out.add_row(pair_name("mb1", i, j), row, Relation::ge, 0.0);
            row = {{j, 1.0}, {m, -1.0}};
            out.add_row(pair_name("mb2", i, j), row, Relation::ge, 0.0);
        }
}

void emit_sampling_dual(const SamplingLpConfig& cfg, LpBuilder& out) {
    const auto co = sampling_coefficients(cfg);
    const int n = cfg.n_buckets;
    const SamplingDualLayout L(n);
    out.set_sense(Sense::maximize);
    for (const auto& [i, j] : L.tri) out.add_variable(pair_name("x", i, j), 0.0);
    out.add_variable("y", co.rhs);
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) out.add_variable(pair_name("v", i, j), 0.0);
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) out.add_variable(pair_name("w", i, j), 0.0);
    std::vector<LpTerm> row;
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            row = {{L.y(), co.a[i + j]}, {L.v(i, j), -1.0}, {L.w(i, j), -1.0}};
            out.add_row(pair_name("dm", i, j), row, Relation::le, 0.0);
        }
    std::vector<std::vector<LpTerm>> tri_terms(n + 1);
    for (std::size_t t = 0; t < L.tri.size(); ++t) {
        const auto [i, j] = L.tri[t];
        tri_terms[i].push_back({static_cast<int>(t), 1.0});
        tri_terms[j].push_back({static_cast<int>(t), 1.0});
        tri_terms[i + j].push_back({static_cast<int>(t), -1.0});
    }
    for (int k = 0; k <= n; ++k) {
        row = tri_terms[k];
        row.push_back({L.y(), co.g[k]});
        for (int j = k; j <= n; ++j) row.push_back({L.v(k, j), 1.0});
        for (int j = 0; j <= k; ++j) row.push_back({L.w(j, k), 1.0});
        compact(row);
        out.add_row("db_" + index_name(k), row, Relation::le, co.c[k]);
    }
}

void emit_mrr_lp(const MrrLpConfig& cfg, LpBuilder& out) {
    cfg.validate();
    const MrrLayout L(cfg);
    const int n = cfg.n_buckets, a = cfg.a;
    const auto c = objective_weights(cfg.beta, n);
    out.set_sense(Sense::minimize);
    for (int i = 0; i <= n; ++i) out.add_variable("B_" + index_name(i), c[i]);
    for (int k = -a; k <= n; ++k) out.add_variable("A_" + index_name(k), 0.0, false);
    for (const auto& p : L.pairs) out.add_variable(pair_name("M", p.j, p.i), 0.0);
    std::vector<LpTerm> row;
    for (int i = 2; i <= n; ++i) {
        row = {{L.pB(1), static_cast<double>(i)}, {L.pB(i), -1.0}};
        out.add_row("sub_" + index_name(i), row, Relation::ge, 0.0);
    }
    std::vector<std::vector<int>> by_bucket(n + 1);
    for (std::size_t id = 0; id < L.pairs.size(); ++id) by_bucket[L.pairs[id].i].push_back(static_cast<int>(id));
    for (int i = 1; i <= n; ++i) {
        row = {{L.pB(i), 1.0}};
        for (int id : by_bucket[i]) row.push_back({L.pM(id), 2.0 * cfg.beta});
        out.add_row("mr_" + index_name(i), row, Relation::ge, i * cfg.beta * cfg.beta);
    }
    for (std::size_t id = 0; id < L.pairs.size(); ++id) {
        const auto& p = L.pairs[id];
        row = {{L.pA(p.first), 1.0}, {L.pM(static_cast<int>(id)), -1.0}};
        out.add_row(pair_name("min1", p.j, p.i), row, Relation::ge, 0.0);
        row = {{L.pA(p.second), 1.0}, {L.pM(static_cast<int>(id)), -1.0}};
        out.add_row(pair_name("min2", p.j, p.i), row, Relation::ge, 0.0);
    }
    for (int k = -a; k <= n; ++k) {
        row.clear();
        for (int l = L.lo(k); l <= L.hi(k); ++l) row.push_back({L.pB(l), 1.0});
        row.push_back({L.pA(k), -1.0});
        out.add_row("int_" + index_name(k), row, Relation::eq, 0.0);
    }
}

void emit_mrr_dual(const MrrLpConfig& cfg, LpBuilder& out) {
    cfg.validate();
    const MrrLayout L(cfg);
    const int n = cfg.n_buckets, a = cfg.a;
    const auto c = objective_weights(cfg.beta, n);
    out.set_sense(Sense::maximize);
    for (int i = 2; i <= n; ++i) out.add_variable("x_" + index_name(i), 0.0);
    for (int i = 1; i <= n; ++i) out.add_variable("y_" + index_name(i), i * cfg.beta * cfg.beta);
    for (const auto& p : L.pairs) out.add_variable(pair_name("v", p.j, p.i), 0.0);
    for (const auto& p : L.pairs) out.add_variable(pair_name("w", p.j, p.i), 0.0);
    for (int k = -a; k <= n; ++k) out.add_variable("z_" + index_name(k), 0.0, false);
    std::vector<LpTerm> row;
    for (int l = 0; l <= n; ++l) {
        row.clear();
        if (l >= 1) row.push_back({L.dy(l), 1.0});
        for (int k = l - a; k <= l; ++k) row.push_back({L.dz(k), 1.0});
        if (l == 1)
            for (int j = 2; j <= n; ++j) row.push_back({L.dx(j), static_cast<double>(j)});
        if (l >= 2) row.push_back({L.dx(l), -1.0});
        compact(row);
        out.add_row("db_" + index_name(l), row, Relation::le, c[l]);
    }
    for (std::size_t id = 0; id < L.pairs.size(); ++id) {
        const auto& p = L.pairs[id];
        row = {{L.dy(p.i), 2.0 * cfg.beta}, {L.dv(static_cast<int>(id)), -1.0}, {L.dw(static_cast<int>(id)), -1.0}};
        out.add_row(pair_name("dm", p.j, p.i), row, Relation::le, 0.0);
    }
    for (int k = -a; k <= n; ++k) {
        row.clear();
        for (int id : L.first_of[k + a]) row.push_back({L.dv(id), 1.0});
        for (int id : L.second_of[k + a]) row.push_back({L.dw(id), 1.0});
        row.push_back({L.dz(k), -1.0});
        compact(row);
        out.add_row("dz_" + index_name(k), row, Relation::eq, 0.0);
    }
}

LpModel build_sampling_lp(const SamplingLpConfig& cfg) {
    LpModel m;
    emit_sampling_lp(cfg, m);
    return m;
}

LpModel build_sampling_dual(const SamplingLpConfig& cfg) {
    LpModel m;
    emit_sampling_dual(cfg, m);
    return m;
}

LpModel build_mrr_lp(const MrrLpConfig& cfg) {
    LpModel m;
    emit_mrr_lp(cfg, m);
    return m;
}

LpModel build_mrr_dual(const MrrLpConfig& cfg) {
    LpModel m;
    emit_mrr_dual(cfg, m);
    return m;
}

LpSolution solve_model_directly(const LpModel& model, const SimplexOptions& opts) { return solve_lp(model, opts); }

namespace {

void fill_violations(BoundSolve& out, const LpModel& primal, const LpModel& dual) {
    out.primal_violation = primal_violation(primal, out.primal_point).max_violation;
    out.dual_violation = primal_violation(dual, out.dual_point).max_violation;
    out.primal_value = primal.objective_value(out.primal_point);
    out.dual_value = dual.objective_value(out.dual_point);
    out.ratio_bound = bound_from_primal(out.primal_value);
}

}  // namespace

namespace {

void check_bucket_budget(int n, const BoundSolveOptions& opts) {
    if (n > opts.max_buckets)
        throw BudgetExceeded("N = " + std::to_string(n) + " exceeds the solver budget of " +
                             std::to_string(opts.max_buckets) + " buckets");
}

}  // namespace

BoundSolve solve_sampling_bound(const SamplingLpConfig& cfg, const BoundSolveOptions& opts) {
    cfg.validate();
    check_bucket_budget(cfg.n_buckets, opts);
    const auto co = sampling_coefficients(cfg);
    const int n = cfg.n_buckets;
    const PairIndex pidx(n);
    const auto tri = triangle_pairs(n);

    // restricted covering problem over B
    CoveringLp lp;
    lp.cost = co.c;
    struct RowInfo {
        bool cut;
        int tri_id;
        std::vector<char> choose_first;  // per pair, for cuts
    };
    std::vector<RowInfo> info;
    std::vector<char> tri_added(tri.size(), 0);

    auto master_value = [&](const std::vector<double>& b) {
        double f = 0.0;
        for (int k = 0; k <= n; ++k) f += co.g[k] * b[k];
        for (int i = 0; i <= n; ++i)
            for (int j = i; j <= n; ++j) f += co.a[i + j] * std::min(b[i], b[j]);
        return f;
    };
    auto add_cut = [&](const std::vector<double>& b) {
        std::vector<double> coef(co.g);
        std::vector<char> first(pidx.count());
        for (int i = 0; i <= n; ++i)
            for (int j = i; j <= n; ++j) {
                const bool f = b[i] <= b[j];
                first[pidx(i, j)] = f;
                coef[f ? i : j] += co.a[i + j];
            }
        std::vector<LpTerm> row;
        for (int k = 0; k <= n; ++k)
            if (coef[k] != 0.0) row.push_back({k, coef[k]});
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(co.rhs);
        info.push_back({true, -1, std::move(first)});
    };

    add_cut(std::vector<double>(n + 1, 1.0));
    BoundSolve out;
    CoveringSolution sol;
    std::vector<double> b;
    for (;;) {
        if (++out.rounds > opts.max_rounds) throw NumericalFailure("sampling LP row generation did not converge");
        sol = solve_covering_lp(lp, opts.simplex);
        out.iterations += sol.iterations;
        b = sol.x;
        const double bmax = std::max(1e-300, *std::max_element(b.begin(), b.end()));
        bool added = false;
        if (master_value(b) < co.rhs * (1.0 - opts.feasibility_tolerance)) {
            add_cut(b);
            added = true;
        }
        std::vector<std::pair<double, int>> viol;
        for (std::size_t t = 0; t < tri.size(); ++t) {
            if (tri_added[t]) continue;
            const auto [i, j] = tri[t];
            const double excess = b[i + j] - b[i] - b[j];
            if (excess > opts.feasibility_tolerance * bmax) viol.emplace_back(-excess, static_cast<int>(t));
        }
        std::sort(viol.begin(), viol.end());
        if (static_cast<int>(viol.size()) > opts.max_new_rows_per_round) viol.resize(opts.max_new_rows_per_round);
        for (const auto& [neg, t] : viol) {
            const auto [i, j] = tri[t];
            std::vector<LpTerm> row{{i, 1.0}, {j, 1.0}, {i + j, -1.0}};
            compact(row);
            lp.rows.push_back(std::move(row));
            lp.rhs.push_back(0.0);
            info.push_back({false, t, {}});
            tri_added[t] = 1;
            added = true;
        }
        if (!added) break;
    }
    out.generated_rows = static_cast<int>(lp.rows.size());

    // restore exact feasibility of the homogeneous model
    const double f = master_value(b);
    if (f < co.rhs && f > 0.0)
        for (double& v : b) v *= co.rhs / f;

    const SamplingDualLayout L(n);
    out.primal_point.assign(n + 1 + pidx.count(), 0.0);
    for (int k = 0; k <= n; ++k) out.primal_point[k] = b[k];
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) out.primal_point[n + 1 + pidx(i, j)] = std::min(b[i], b[j]);

    out.dual_point.assign(L.size(), 0.0);
    std::vector<int> tri_pos(tri.size());
    for (std::size_t t = 0; t < tri.size(); ++t) tri_pos[t] = static_cast<int>(t);
    for (std::size_t r = 0; r < info.size(); ++r) {
        const double u = sol.duals[r];
        if (u <= 0.0) continue;
        if (!info[r].cut) {
            out.dual_point[tri_pos[info[r].tri_id]] += u;
            continue;
        }
        out.dual_point[L.y()] += u;
        for (int i = 0; i <= n; ++i)
            for (int j = i; j <= n; ++j) {
                const double val = u * co.a[i + j];
                if (info[r].choose_first[pidx(i, j)]) out.dual_point[L.v(i, j)] += val;
                else out.dual_point[L.w(i, j)] += val;
            }
    }
    fill_violations(out, build_sampling_lp(cfg), build_sampling_dual(cfg));
    return out;
}

BoundSolve solve_mrr_bound(const MrrLpConfig& cfg, const BoundSolveOptions& opts) {
    cfg.validate();
    check_bucket_budget(cfg.n_buckets, opts);
    const MrrLayout L(cfg);
    const int n = cfg.n_buckets, a = cfg.a;
    const double beta = cfg.beta;
    CoveringLp lp;
    lp.cost = objective_weights(beta, n);
    struct RowInfo {
        int bucket;                      // 0 for sublinear rows
        int sub_index;                   // i of the sublinear row
        std::vector<char> choose_first;  // per pair of this bucket
    };
    std::vector<RowInfo> info;
    std::vector<std::vector<int>> by_bucket(n + 1);
    for (std::size_t id = 0; id < L.pairs.size(); ++id) by_bucket[L.pairs[id].i].push_back(static_cast<int>(id));

    for (int i = 2; i <= n; ++i) {
        lp.rows.push_back({{1, static_cast<double>(i)}, {i, -1.0}});
        lp.rhs.push_back(0.0);
        info.push_back({0, i, {}});
    }
    auto intervals = [&](const std::vector<double>& b) {
        std::vector<double> prefix(n + 2, 0.0);
        for (int l = 0; l <= n; ++l) prefix[l + 1] = prefix[l] + b[l];
        std::vector<double> av(n + a + 1);
        for (int k = -a; k <= n; ++k) av[k + a] = prefix[L.hi(k) + 1] - prefix[L.lo(k)];
        return av;
    };
    auto bucket_value = [&](int i, const std::vector<double>& b, const std::vector<double>& av) {
        double s = b[i];
        for (int id : by_bucket[i]) {
            const auto& p = L.pairs[id];
            s += 2.0 * beta * std::min(av[p.first + a], av[p.second + a]);
        }
        return s;
    };
    auto add_cut = [&](int i, const std::vector<double>& av) {
        std::vector<double> coef(n + 1, 0.0);
        coef[i] += 1.0;
        std::vector<char> first;
        for (int id : by_bucket[i]) {
            const auto& p = L.pairs[id];
            const bool f = av[p.first + a] <= av[p.second + a];
            first.push_back(f);
            const int k = f ? p.first : p.second;
            for (int l = L.lo(k); l <= L.hi(k); ++l) coef[l] += 2.0 * beta;
        }
        std::vector<LpTerm> row;
        for (int l = 0; l <= n; ++l)
            if (coef[l] != 0.0) row.push_back({l, coef[l]});
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(i * beta * beta);
        info.push_back({i, 0, std::move(first)});
    };
    {
        const std::vector<double> ones(n + 1, 1.0);
        const auto av = intervals(ones);
        for (int i = 1; i <= n; ++i) add_cut(i, av);
    }
    BoundSolve out;
    CoveringSolution sol;
    std::vector<double> b;
    for (;;) {
        if (++out.rounds > opts.max_rounds) throw NumericalFailure("master-route LP row generation did not converge");
        sol = solve_covering_lp(lp, opts.simplex);
        out.iterations += sol.iterations;
        b = sol.x;
        const auto av = intervals(b);
        bool added = false;
        for (int i = 1; i <= n; ++i)
            if (bucket_value(i, b, av) < i * beta * beta * (1.0 - opts.feasibility_tolerance)) {
                add_cut(i, av);
                added = true;
            }
        if (!added) break;
    }
    out.generated_rows = static_cast<int>(lp.rows.size());
    {
        const auto av = intervals(b);
        double t = 1.0;
        for (int i = 1; i <= n; ++i) {
            const double g = bucket_value(i, b, av);
            if (g > 0.0) t = std::max(t, i * beta * beta / g);
        }
        if (t > 1.0)
            for (double& v : b) v *= t;
    }
    const auto av = intervals(b);
    out.primal_point.assign(L.primal_size(), 0.0);
    for (int l = 0; l <= n; ++l) out.primal_point[L.pB(l)] = b[l];
    for (int k = -a; k <= n; ++k) out.primal_point[L.pA(k)] = av[k + a];
    for (std::size_t id = 0; id < L.pairs.size(); ++id) {
        const auto& p = L.pairs[id];
        out.primal_point[L.pM(static_cast<int>(id))] = std::min(av[p.first + a], av[p.second + a]);
    }

    out.dual_point.assign(L.dual_size(), 0.0);
    for (std::size_t r = 0; r < info.size(); ++r) {
        const double u = sol.duals[r];
        if (u <= 0.0) continue;
        if (info[r].bucket == 0) {
            out.dual_point[L.dx(info[r].sub_index)] += u;
            continue;
        }
        const int i = info[r].bucket;
        out.dual_point[L.dy(i)] += u;
        const auto& ids = by_bucket[i];
        for (std::size_t q = 0; q < ids.size(); ++q) {
            const int id = ids[q];
            if (info[r].choose_first[q]) out.dual_point[L.dv(id)] += 2.0 * beta * u;
            else out.dual_point[L.dw(id)] += 2.0 * beta * u;
        }
    }
    for (int k = -a; k <= n; ++k) {
        double z = 0.0;
        for (int id : L.first_of[k + a]) z += out.dual_point[L.dv(id)];
        for (int id : L.second_of[k + a]) z += out.dual_point[L.dw(id)];
        out.dual_point[L.dz(k)] = z;
    }
    fill_violations(out, build_mrr_lp(cfg), build_mrr_dual(cfg));
    return out;
}

const char* to_string(CertKind kind) { return kind == CertKind::sampling ? "sampling" : "mrr"; }

CertKind parse_cert_kind(const std::string& text) {
    if (text == "sampling") return CertKind::sampling;
    if (text == "mrr") return CertKind::mrr;
    throw InvalidInput("unknown certificate kind '" + text + "' (expected sampling or mrr)");
}

namespace {

// Shortest decimal that round-trips, read back exactly; keeps "0.663" as 663/1000.
Rational decimal_rational(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    for (int prec = 1; prec <= 17; ++prec) {
        char tmp[32];
        std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
        if (std::strtod(tmp, nullptr) == v) return parse_rational(tmp);
    }
    return parse_rational(buf);
}

}  // namespace

ExactParams exact_params(const SamplingLpConfig& cfg) {
    cfg.validate();
    ExactParams p;
    p.alpha = decimal_rational(cfg.alpha);
    p.sigma = decimal_rational(cfg.sigma);
    p.beta = decimal_rational(cfg.beta);
    p.n_buckets = cfg.n_buckets;
    return p;
}

ExactParams exact_params(const MrrLpConfig& cfg) {
    cfg.validate();
    ExactParams p;
    p.beta = decimal_rational(cfg.beta);
    p.n_buckets = cfg.n_buckets;
    p.a = cfg.a;
    p.h = cfg.h;
    return p;
}

namespace {

Rational nonneg_rational(double v) { return v > 0.0 ? exact_rational(v) : Rational(0); }

MrrLpConfig mrr_shape(const ExactParams& p) {
    MrrLpConfig cfg;
    cfg.beta = 1.0;  // shape only
    cfg.n_buckets = p.n_buckets;
    cfg.a = p.a;
    cfg.h = p.h;
    cfg.validate();
    return cfg;
}

void recompute_z(DualCertificate& cert) {
    const MrrLpConfig shape = mrr_shape(cert.params);
    cert.z.clear();
    auto add = [&](int k, const Rational& val) {
        auto [it, fresh] = cert.z.emplace(k, val);
        if (!fresh) it->second += val;
    };
    for (const auto& [key, val] : cert.v) add(shape.first_index(key.first, key.second), val);
    for (const auto& [key, val] : cert.w) add(shape.second_index(key.first, key.second), val);
}

}  // namespace

DualCertificate rationalize_sampling(const SamplingLpConfig& cfg, const BoundSolve& solve, double safety) {
    const int n = cfg.n_buckets;
    const SamplingDualLayout L(n);
    if (static_cast<int>(solve.dual_point.size()) != L.size()) throw InvalidInput("dual point does not match the config");
    DualCertificate cert;
    cert.kind = CertKind::sampling;
    cert.params = exact_params(cfg);
    const Rational s = Rational(1) - exact_rational(safety);
    for (std::size_t t = 0; t < L.tri.size(); ++t) {
        const double v = solve.dual_point[t];
        if (v > 0.0) cert.x2[L.tri[t]] = s * nonneg_rational(v);
    }
    cert.y = s * s * nonneg_rational(solve.dual_point[L.y()]);
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const double v = solve.dual_point[L.v(i, j)], w = solve.dual_point[L.w(i, j)];
            if (v > 0.0) cert.v[{i, j}] = s * nonneg_rational(v);
            if (w > 0.0) cert.w[{i, j}] = s * nonneg_rational(w);
        }
    return cert;
}

DualCertificate rationalize_mrr(const MrrLpConfig& cfg, const BoundSolve& solve, double safety) {
    const MrrLayout L(cfg);
    const int n = cfg.n_buckets;
    if (static_cast<int>(solve.dual_point.size()) != L.dual_size()) throw InvalidInput("dual point does not match the config");
    DualCertificate cert;
    cert.kind = CertKind::mrr;
    cert.params = exact_params(cfg);
    const Rational s = Rational(1) - exact_rational(safety);
    for (int i = 2; i <= n; ++i)
        if (solve.dual_point[L.dx(i)] > 0.0) cert.x1[i] = s * nonneg_rational(solve.dual_point[L.dx(i)]);
    for (int i = 1; i <= n; ++i)
        if (solve.dual_point[L.dy(i)] > 0.0) cert.y1[i] = s * s * nonneg_rational(solve.dual_point[L.dy(i)]);
    for (std::size_t id = 0; id < L.pairs.size(); ++id) {
        const PairKey key{L.pairs[id].j, L.pairs[id].i};
        const double v = solve.dual_point[L.dv(static_cast<int>(id))], w = solve.dual_point[L.dw(static_cast<int>(id))];
        if (v > 0.0) cert.v[key] = s * nonneg_rational(v);
        if (w > 0.0) cert.w[key] = s * nonneg_rational(w);
    }
    recompute_z(cert);
    return cert;
}

namespace {

std::string margin_row(const std::string& prefix, int i, int j) { return pair_name(prefix.c_str(), i, j); }

VerificationResult violated(const std::string& row, const Rational& lhs, const Rational& rhs) {
    VerificationResult r;
    r.feasible = false;
    r.violated_row = row;
    r.margin = round_up(Rational(lhs - rhs));
    std::ostringstream os;
    os << "row " << row << " violated: lhs exceeds rhs by " << r.margin;
    r.message = os.str();
    return r;
}

void require_nonneg(const Rational& q, const std::string& what) {
    if (sgn(q) < 0) throw InvalidInput("certificate entry " + what + " is negative");
}

}  // namespace

VerificationResult verify_sampling_certificate(const DualCertificate& cert) {
    if (cert.kind != CertKind::sampling) throw InvalidInput("certificate is not of kind sampling");
    const ExactParams& P = cert.params;
    const int n = P.n_buckets;
    if (n < 1) throw InvalidInput("certificate config needs N >= 1");
    if (sgn(P.beta) <= 0 || sgn(P.sigma) <= 0 || P.sigma > 1 || sgn(P.alpha) < 0)
        throw InvalidInput("certificate config out of range");
    if (!cert.x1.empty() || !cert.y1.empty() || !cert.z.empty())
        throw InvalidInput("sampling certificate carries master-route-ratio entries");
    require_nonneg(cert.y, "y");
    for (const auto& [k, q] : cert.x2) {
        const auto [i, j] = k;
        if (i < 1 || j < i || i + j > n) throw InvalidInput("x index out of range: " + margin_row("x", i, j));
        require_nonneg(q, margin_row("x", i, j));
    }
    for (const auto* m : {&cert.v, &cert.w})
        for (const auto& [k, q] : *m) {
            const auto [i, j] = k;
            if (i < 0 || j < i || j > n) throw InvalidInput("v/w index out of range: " + margin_row("v", i, j));
            require_nonneg(q, margin_row(m == &cert.v ? "v" : "w", i, j));
        }

    const Rational x = P.sigma * P.beta;
    // upper enclosures of e^{-(s-1)x}, s = 0..2N
    std::vector<Rational> e_hi(2 * n + 1);
    for (int s = 0; s <= 2 * n; ++s) e_hi[s] = exp_enclosure(Rational(-(s - 1)) * x).hi;
    const Interval ex = exp_enclosure(x), enx = exp_enclosure(Rational(n) * x);
    const Interval eneg = exp_enclosure(-x), enegn = exp_enclosure(Rational(-n) * x);
    if (ex.lo <= 1) throw NumericalFailure("enclosure of e^{sigma beta} too wide");
    const Rational denom_lo = enx.lo * (ex.lo - 1);
    const Rational delta1_hi = 4 * P.beta / denom_lo;
    const Rational one_minus_q_lo = 1 - eneg.hi;
    const Rational delta2_hi = (P.alpha + 2 * P.beta / denom_lo) * enegn.hi / (one_minus_q_lo * one_minus_q_lo) *
                               (1 + n - eneg.lo * n);

    // dm rows: 4 beta e^{-(i+j-1)x} y <= v_ij + w_ij
    std::vector<Rational> ay(2 * n + 1);
    for (int s = 0; s <= 2 * n; ++s) ay[s] = 4 * P.beta * e_hi[s] * cert.y;
    const Rational zero(0);
    auto lookup = [&](const std::map<PairKey, Rational>& m, int i, int j) -> const Rational& {
        auto it = m.find({i, j});
        return it == m.end() ? zero : it->second;
    };
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const Rational& lhs = ay[i + j];
            if (sgn(lhs) == 0) continue;
            Rational rhs = lookup(cert.v, i, j) + lookup(cert.w, i, j);
            if (lhs > rhs) return violated(margin_row("dm", i, j), lhs, rhs);
        }
    // db rows
    std::vector<Rational> lhs(n + 1);
    for (const auto& [k, q] : cert.v) lhs[k.first] += q;
    for (const auto& [k, q] : cert.w) lhs[k.second] += q;
    for (const auto& [k, q] : cert.x2) {
        lhs[k.first] += q;
        lhs[k.second] += q;
        lhs[k.first + k.second] -= q;
    }
    for (int k = 0; k <= n; ++k) {
        Rational g = (P.alpha + delta1_hi) * e_hi[k];
        if (k == 1) g += delta2_hi;
        lhs[k] += g * cert.y;
        const Rational c_lo = exp_enclosure(-(Rational(k) + Rational(1, 2)) * P.beta).lo;
        if (lhs[k] > c_lo) return violated("db_" + index_name(k), lhs[k], c_lo);
    }
    VerificationResult r;
    r.feasible = true;
    if (sgn(cert.y) > 0) {
        r.bound = Rational(P.sigma * P.sigma / cert.y);
        std::ostringstream os;
        os << "certificate feasible; upper bound " << round_up(*r.bound);
        r.message = os.str();
    } else {
        r.message = "certificate feasible; no finite bound (y = 0)";
    }
    return r;
}

VerificationResult verify_mrr_certificate(const DualCertificate& cert) {
    if (cert.kind != CertKind::mrr) throw InvalidInput("certificate is not of kind mrr");
    const ExactParams& P = cert.params;
    if (sgn(P.beta) <= 0) throw InvalidInput("certificate config needs beta > 0");
    const MrrLpConfig shape = mrr_shape(P);
    const int n = P.n_buckets, a = P.a;
    if (!cert.x2.empty() || sgn(cert.y) != 0) throw InvalidInput("master-route-ratio certificate carries sampling entries");
    for (const auto& [i, q] : cert.x1) {
        if (i < 2 || i > n) throw InvalidInput("x index out of range: x_" + index_name(i));
        require_nonneg(q, "x_" + index_name(i));
    }
    for (const auto& [i, q] : cert.y1) {
        if (i < 1 || i > n) throw InvalidInput("y index out of range: y_" + index_name(i));
        require_nonneg(q, "y_" + index_name(i));
    }
    for (const auto* m : {&cert.v, &cert.w})
        for (const auto& [k, q] : *m) {
            const auto [j, i] = k;
            if (i < 1 || i > n || j < 1 || j > shape.j_max(i))
                throw InvalidInput("v/w index out of range: " + margin_row("v", j, i));
            require_nonneg(q, margin_row(m == &cert.v ? "v" : "w", j, i));
        }
    for (const auto& [k, q] : cert.z)
        if (k < -a || k > n) throw InvalidInput("z index out of range: z_" + index_name(k));

    const Rational zero(0);
    auto get = [&](const std::map<int, Rational>& m, int k) -> const Rational& {
        auto it = m.find(k);
        return it == m.end() ? zero : it->second;
    };
    // db rows
    Rational xsum;
    for (const auto& [j, q] : cert.x1) xsum += j * q;
    Rational window;  // sum of z_k for k in [l - a, l]
    for (int k = -a; k <= -1; ++k) window += get(cert.z, k);
    for (int l = 0; l <= n; ++l) {
        window += get(cert.z, l);
        if (l - a - 1 >= -a) window -= get(cert.z, l - a - 1);
        Rational lhs = window;
        if (l >= 1) lhs += get(cert.y1, l);
        if (l == 1) lhs += xsum;
        if (l >= 2) lhs -= get(cert.x1, l);
        const Rational c_lo = exp_enclosure(-(Rational(l) + Rational(1, 2)) * P.beta).lo;
        if (lhs > c_lo) return violated("db_" + index_name(l), lhs, c_lo);
    }
    // dm rows
    for (int i = 1; i <= n; ++i) {
        const Rational lhs = 2 * P.beta * get(cert.y1, i);
        for (int j = 1; j <= shape.j_max(i); ++j) {
            auto iv = cert.v.find({j, i});
            auto iw = cert.w.find({j, i});
            Rational rhs = (iv == cert.v.end() ? zero : iv->second) + (iw == cert.w.end() ? zero : iw->second);
            if (lhs > rhs) return violated(margin_row("dm", j, i), lhs, rhs);
        }
    }
    // dz rows
    std::vector<Rational> sums(n + a + 1);
    for (const auto& [k, q] : cert.v) sums[shape.first_index(k.first, k.second) + a] += q;
    for (const auto& [k, q] : cert.w) sums[shape.second_index(k.first, k.second) + a] += q;
    for (int k = -a; k <= n; ++k) {
        const Rational& z = get(cert.z, k);
        if (sums[k + a] != z) {
            auto r = violated("dz_" + index_name(k), sums[k + a], z);
            if (sums[k + a] < z) r.margin = -round_up(Rational(z - sums[k + a]));
            return r;
        }
    }
    VerificationResult r;
    r.feasible = true;
    Rational total;
    for (const auto& [i, q] : cert.y1) total += i * P.beta * P.beta * q;
    if (sgn(total) > 0) {
        r.bound = Rational(1 / total);
        std::ostringstream os;
        os << "certificate feasible; upper bound " << round_up(*r.bound);
        r.message = os.str();
    } else {
        r.message = "certificate feasible; no finite bound (all y = 0)";
    }
    return r;
}

VerificationResult verify_certificate(const DualCertificate& cert) {
    return cert.kind == CertKind::sampling ? verify_sampling_certificate(cert) : verify_mrr_certificate(cert);
}

namespace {

std::vector<int> split_indices(const std::string& rest) {
    std::vector<int> out;
    std::stringstream ss(rest);
    std::string part;
    while (std::getline(ss, part, '_')) {
        if (part.empty()) throw InvalidInput("malformed variable name index");
        bool neg = false;
        if (part[0] == 'm') {
            neg = true;
            part.erase(0, 1);
        }
        for (char c : part)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw InvalidInput("malformed variable name index");
        out.push_back(neg ? -std::stoi(part) : std::stoi(part));
    }
    return out;
}

}  // namespace

DualCertificate certificate_from_solution(CertKind kind, const ExactParams& params, std::istream& in) {
    DualCertificate cert;
    cert.kind = kind;
    cert.params = params;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string name, value;
        if (!(ls >> name)) continue;
        if (!(ls >> value)) throw InvalidInput("solution line lacks a value: " + name);
        if (value == "=" && !(ls >> value)) throw InvalidInput("solution line lacks a value: " + name);
        const auto us = name.find('_');
        const std::string head = name.substr(0, us);
        const std::vector<int> idx = us == std::string::npos ? std::vector<int>{} : split_indices(name.substr(us + 1));
        Rational q = parse_rational(value);
        if (sgn(q) == 0) continue;
        if (kind == CertKind::sampling) {
            if (head == "y" && idx.empty()) cert.y = q;
            else if (head == "x" && idx.size() == 2) cert.x2[{idx[0], idx[1]}] = q;
            else if (head == "v" && idx.size() == 2) cert.v[{idx[0], idx[1]}] = q;
            else if (head == "w" && idx.size() == 2) cert.w[{idx[0], idx[1]}] = q;
        } else {
            if (head == "x" && idx.size() == 1) cert.x1[idx[0]] = q;
            else if (head == "y" && idx.size() == 1) cert.y1[idx[0]] = q;
            else if (head == "v" && idx.size() == 2) cert.v[{idx[0], idx[1]}] = q;
            else if (head == "w" && idx.size() == 2) cert.w[{idx[0], idx[1]}] = q;
            // z is implied exactly by v and w
        }
    }
    if (kind == CertKind::mrr) recompute_z(cert);
    return cert;
}

}  // namespace aptsp
