#pragma once

#include <cstdint>
#include <vector>

#include "cogverify/checker.hpp"
#include "cogverify/model.hpp"

namespace cogverify {

struct Estimate {
    double estimate = 0.0;
    double lo = 0.0;  // Wilson interval
    double hi = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
};

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489;

/// Wilson score interval for `hits` successes out of `n`.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = kZ99);

/// Fraction of sampled paths from the initial state that visit `target` within
/// `horizon` steps (the start counts as step 0). Samples are split over a
/// fixed number of shards, each seeded from `seed`, so the result does not
/// depend on the worker count.
Estimate monte_carlo(const MarkovChain& mc, const StateMask& target, std::size_t samples, std::size_t horizon,
                     std::uint64_t seed);

/// The paths behind monte_carlo(mc, target, count, horizon, seed); each stops
/// at the first target visit or after `horizon` steps.
std::vector<std::vector<StateIndex>> sample_paths(const MarkovChain& mc, const StateMask& target,
                                                  std::size_t count, std::size_t horizon, std::uint64_t seed);

}  // namespace cogverify
