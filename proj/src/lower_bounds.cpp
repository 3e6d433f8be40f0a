#include "aptsp/lower_bounds.hpp"

#include "aptsp/errors.hpp"
#include "aptsp/evaluation.hpp"

#include <cmath>
#include <string>

namespace aptsp {

void SamplingLbParams::validate() const {
    if (!(gamma >= 1.0 && gamma <= 2.0)) throw InvalidInput("gamma must lie in [1, 2]");
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("p must lie in (0, 1]");
    const double k = gamma / p;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) throw InvalidInput("gamma / p must be an integer");
    if (n < 3) throw InvalidInput("n must be at least 3");
}

long long SamplingLbParams::plateau() const { return std::llround(gamma / p); }

double sampling_lb_c(const SamplingLbParams& params, long long k) {
    const long long plateau = params.plateau();
    return static_cast<double>(k <= plateau ? plateau : k);
}

Instance gen_sampling_lb_instance(const SamplingLbParams& params) {
    params.validate();
    const int n = params.n;
    if (n > 20000) throw BudgetExceeded("sampling lower-bound instance limited to 20000 customers");
    std::vector<double> row(n, 0.0);
    for (int k = 1; k < n; ++k) row[k] = sampling_lb_c(params, std::min(k, n - k)) / n;
    std::vector<double> matrix(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) matrix[static_cast<std::size_t>(i) * n + j] = row[(j - i + n) % n];
    std::vector<double> p(n, params.p);
    p[0] = 1.0;
    return Instance(n, std::move(matrix), std::move(p), 0);
}

OptUpperBound opt_upper_bound_sampling_lb(const SamplingLbParams& params) {
    const Instance inst = gen_sampling_lb_instance(params);
    OptUpperBound out;
    out.exact = expected_tour_cost_exact(inst, Tour::identity(inst.size()));
    out.closed = params.gamma + std::pow(1.0 - params.p, static_cast<double>(params.plateau()));
    return out;
}

double hop_sum_closed(double beta, const SamplingLbParams& params, long long k) {
    const double bp = beta * params.p;
    const double base = 1.0 - bp;
    auto power = [&](long long e) { return e == 0 ? 1.0 : std::pow(base, static_cast<double>(e)); };
    return beta * params.gamma + power(params.plateau()) - (1.0 + bp * static_cast<double>(k)) * power(k);
}

double sampling_lb_ratio(double alpha, double gamma, double sigma) {
    if (!(alpha > 0.0 && gamma > 0.0 && sigma > 0.0)) throw InvalidInput("alpha, gamma and sigma must be positive");
    const double sg = sigma * gamma;
    return (alpha * (sg + std::exp(-sg)) + 2.0 * gamma + std::exp(-2.0 * sg) / sigma) / (gamma + std::exp(-gamma));
}

double optimize_sigma(double alpha, double gamma) {
    if (!(alpha > 0.0 && gamma > 0.0)) throw InvalidInput("alpha and gamma must be positive");
    auto g = [&](double s) {
        const double sg = s * gamma;
        return s * s * alpha * gamma * (std::exp(2.0 * sg) - std::exp(sg)) - (1.0 + 2.0 * sg);
    };
    double lo = 0.0, hi = 1.0;
    while (g(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw NumericalFailure("optimize_sigma: no sign change");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

GammaSigma optimize_gamma_sigma(double alpha) {
    if (!(alpha >= 1.0)) throw InvalidInput("alpha must be at least 1");
    auto value = [&](double gamma) { return sampling_lb_ratio(alpha, gamma, optimize_sigma(alpha, gamma)); };
    double best_gamma = 1.0, best = value(1.0);
    for (int i = 1; i <= 1000; ++i) {
        const double gamma = 1.0 + i * 1e-3;
        const double v = value(gamma);
        if (v > best) {
            best = v;
            best_gamma = gamma;
        }
    }
    // golden-section maximisation around the best grid point
    double a = std::max(1.0, best_gamma - 1e-3), b = std::min(2.0, best_gamma + 1e-3);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = value(c), fd = value(d);
    while (b - a > 1e-10) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = value(d);
        }
    }
    GammaSigma out;
    out.gamma = 0.5 * (a + b);
    out.ratio = value(out.gamma);
    if (best > out.ratio) {
        out.gamma = best_gamma;
        out.ratio = best;
    }
    out.sigma = optimize_sigma(alpha, out.gamma);
    return out;
}

void MrrLbParams::validate() const {
    if (n < 1 || m < 1) throw InvalidInput("n and m must be at least 1");
}

double MrrLbParams::q() const {
    const double md = static_cast<double>(m);
    return -std::expm1(md * std::log1p(-1.0 / (2.0 * md)));
}

Instance gen_mrr_lb_instance(const MrrLbParams& params) {
    params.validate();
    if (params.n * params.m > 5000) throw BudgetExceeded("group instance limited to 5000 customers");
    const int groups = static_cast<int>(params.n), m = static_cast<int>(params.m);
    const int size = 1 + groups * m;
    std::vector<double> matrix(static_cast<std::size_t>(size) * size, 1.0);
    auto group = [&](int v) { return v == 0 ? -1 : (v - 1) / m; };
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            if (i == j || (group(i) >= 0 && group(i) == group(j))) matrix[static_cast<std::size_t>(i) * size + j] = 0.0;
    std::vector<double> p(size, 1.0 / (2.0 * m));
    p[0] = 1.0;
    std::vector<std::string> names(size);
    names[0] = "d";
    for (int v = 1; v < size; ++v) names[v] = "g" + std::to_string(group(v)) + "_" + std::to_string((v - 1) % m);
    return Instance(size, std::move(matrix), std::move(p), 0, std::move(names));
}

double mrr_lb_ratio(const MrrLbParams& params) {
    params.validate();
    const double n = static_cast<double>(params.n);
    return n / (n * params.q() + 1.0);
}

}  // namespace aptsp
