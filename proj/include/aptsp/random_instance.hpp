#pragma once

#include "aptsp/instance.hpp"

#include <cstdint>
#include <random>

namespace aptsp {

/// SplitMix64 step; used to derive independent RNG seeds from (seed, stream).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct RandomInstanceOptions {
    int n = 8;
    bool with_depot = true;  ///< customer 0 becomes the depot
    double p_min = 0.05;
    double p_max = 0.95;
    double side = 100.0;  ///< points drawn uniformly from [0, side]^2
};

/// Euclidean instance with uniformly random points and probabilities.
Instance random_euclidean_instance(const RandomInstanceOptions& opts, std::mt19937_64& rng);

/// Uniformly random cyclic order.
Tour random_tour(int n, std::mt19937_64& rng);

}  // namespace aptsp
