#pragma once

#include "aptsp/instance.hpp"

#include <cstdint>

namespace aptsp {

struct SamplingLbParams {
    double gamma = 1.0;
    double p = 0.01;  ///< gamma / p must be integral
    int n = 500;

    /// Throws InvalidInput unless gamma in [1,2], 0 < p <= 1, gamma/p integral, n >= 3.
    void validate() const;
    /// K = gamma / p, rounded to the nearest integer.
    long long plateau() const;
};

/// c_k = K for 1 <= k <= K, else k.
double sampling_lb_c(const SamplingLbParams& params, long long k);

/// Cycle instance with d(v_i, v_j) = c_k / n, k = min(j-i, n+i-j); v_0 is the depot.
Instance gen_sampling_lb_instance(const SamplingLbParams& params);

struct OptUpperBound {
    double exact = 0.0;   ///< expected cost of the identity tour
    double closed = 0.0;  ///< gamma + (1-p)^{gamma/p}
};

OptUpperBound opt_upper_bound_sampling_lb(const SamplingLbParams& params);

/// sum_{i=1}^k (beta p)^2 (1 - beta p)^{i-1} c_i in closed form, valid for k >= gamma/p, 0^0 = 1.
double hop_sum_closed(double beta, const SamplingLbParams& params, long long k);

/// (alpha(sigma gamma + e^{-sigma gamma}) + 2 gamma + e^{-2 sigma gamma} / sigma) / (gamma + e^{-gamma}).
double sampling_lb_ratio(double alpha, double gamma, double sigma);

/// Root of sigma^2 alpha gamma (e^{2 sigma gamma} - e^{sigma gamma}) = 1 + 2 sigma gamma by bisection.
double optimize_sigma(double alpha, double gamma);

struct GammaSigma {
    double gamma = 0.0;
    double sigma = 0.0;
    double ratio = 0.0;
};

/// max over gamma in [1,2] of min over sigma of the ratio: 1e-3 grid, then golden section.
GammaSigma optimize_gamma_sigma(double alpha);

struct MrrLbParams {
    std::int64_t n = 3;  ///< groups
    std::int64_t m = 2;  ///< customers per group
    void validate() const;
    /// 1 - (1 - 1/(2m))^m
    double q() const;
};

/// Depot plus n groups of m customers (distance 0 inside a group, 1 elsewhere), p = 1/(2m).
Instance gen_mrr_lb_instance(const MrrLbParams& params);

/// n / (n q + 1).
double mrr_lb_ratio(const MrrLbParams& params);

}  // namespace aptsp
