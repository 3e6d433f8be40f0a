#include "aptsp/random_instance.hpp"

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

namespace aptsp {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Instance random_euclidean_instance(const RandomInstanceOptions& opts, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(0.0, opts.side);
    std::uniform_real_distribution<double> prob(opts.p_min, opts.p_max);
    std::vector<std::pair<double, double>> pts(opts.n);
    for (auto& pt : pts) {
        pt.first = coord(rng);
        pt.second = coord(rng);
    }
    std::vector<double> p(opts.n);
    for (auto& q : p) q = prob(rng);
    std::optional<int> depot;
    if (opts.with_depot) {
        p[0] = 1.0;
        depot = 0;
    }
    return euclidean_instance(pts, std::move(p), depot);
}

Tour random_tour(int n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    return Tour(std::move(order));
}

}  // namespace aptsp
