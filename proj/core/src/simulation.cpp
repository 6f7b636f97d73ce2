#include "cogverify/simulation.hpp"

#include <cmath>
#include <random>

#include "cogverify/parallel.hpp"

namespace cogverify {

namespace {

constexpr std::size_t kShards = 64;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_chain(const MarkovChain& mc, const StateMask& target) {
    if (!mc.is_chain()) throw ModelError("simulation needs a Markov chain (one action per state)");
    if (target.size() != mc.num_states()) throw ModelError("target set does not match the model");
}

std::size_t shard_begin(std::size_t shard, std::size_t samples) { return shard * samples / kShards; }

/// Walks one path; visit(s) is called on every state including the start.
/// Returns whether the target was visited.
template <typename Visit>
bool walk(const MarkovChain& mc, const StateMask& target, std::size_t horizon, std::mt19937_64& rng,
          Visit&& visit) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StateIndex s = mc.initial();
    visit(s);
    if (target[s]) return true;
    for (std::size_t step = 0; step < horizon; ++step) {
        const auto a = mc.action_begin(s);
        double u = unit(rng);
        auto b = mc.branch_begin(a);
        const auto last = mc.branch_end(a) - 1;
        for (; b < last; ++b) {
            u -= mc.probability(b);
            if (u < 0.0) break;
        }
        s = mc.target(b);
        visit(s);
        if (target[s]) return true;
    }
    return false;
}

}  // namespace

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Estimate monte_carlo(const MarkovChain& mc, const StateMask& target, std::size_t samples, std::size_t horizon,
                     std::uint64_t seed) {
    check_chain(mc, target);
    if (samples == 0) throw ModelError("at least one sample is required");
    std::vector<std::size_t> hits(kShards, 0);
    parallel_for(kShards, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t sh = lo; sh < hi; ++sh) {
            std::mt19937_64 rng(splitmix64(seed + sh));
            const std::size_t end = shard_begin(sh + 1, samples);
            for (std::size_t i = shard_begin(sh, samples); i < end; ++i)
                hits[sh] += walk(mc, target, horizon, rng, [](StateIndex) {});
        }
    }, 1);
    Estimate e;
    for (auto h : hits) e.hits += h;
    e.samples = samples;
    e.horizon = horizon;
    e.seed = seed;
    e.estimate = static_cast<double>(e.hits) / static_cast<double>(samples);
    std::tie(e.lo, e.hi) = wilson_interval(e.hits, samples);
    return e;
}

std::vector<std::vector<StateIndex>> sample_paths(const MarkovChain& mc, const StateMask& target,
                                                  std::size_t count, std::size_t horizon, std::uint64_t seed) {
    check_chain(mc, target);
    std::vector<std::vector<StateIndex>> paths(count);
    for (std::size_t sh = 0; sh < kShards; ++sh) {
        std::mt19937_64 rng(splitmix64(seed + sh));
        const std::size_t end = shard_begin(sh + 1, count);
        for (std::size_t i = shard_begin(sh, count); i < end; ++i)
            walk(mc, target, horizon, rng, [&](StateIndex s) { paths[i].push_back(s); });
    }
    return paths;
}

}  // namespace cogverify
