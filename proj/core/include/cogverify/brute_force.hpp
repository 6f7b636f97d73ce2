#pragma once

#include <cstdint>
#include <vector>

#include "cogverify/checker.hpp"
#include "cogverify/model.hpp"

namespace cogverify {

/// Exhaustive optimization over memoryless deterministic schedulers, with each
/// induced chain solved by a direct linear solve. Meant for small models.
struct OracleConfig {
    std::size_t cap = 1'000'000;        // scheduler (or scheduler pair) combinations
    std::size_t node_cap = 50'000'000;  // tree nodes for the bounded variant
};

struct OracleValues {
    std::vector<double> min;  // per state
    std::vector<double> max;
    std::size_t schedulers = 0;
};

/// Product of action counts over non-target states, saturating at SIZE_MAX.
std::size_t scheduler_count(const StochasticGame& g, const StateMask& target);

OracleValues brute_force_reach(const StochasticGame& m, const StateMask& target, const OracleConfig& cfg = {});

/// Expected reward until the target; kInfinity for schedulers that miss the
/// target with positive probability.
OracleValues brute_force_reward(const StochasticGame& m, const RewardFunction& rew, const StateMask& target,
                                const OracleConfig& cfg = {});

/// Optimum over all step-aware choices, by unmemoized recursion over the
/// k-step computation tree.
OracleValues brute_force_bounded_reach(const StochasticGame& m, const StateMask& target, std::size_t k,
                                       const OracleConfig& cfg = {});

/// max over Circle schedulers of min over Box schedulers, pointwise.
struct GameOracle {
    std::vector<double> maxmin;
    std::size_t pairs = 0;
};
GameOracle brute_force_sg_maxmin(const StochasticGame& g, const StateMask& target, const OracleConfig& cfg = {});

/// Keeps only the first action at every state where keep[s] is 0. Used to
/// bring large models under the enumeration cap.
StochasticGame keep_first_action(const StochasticGame& g, const StateMask& keep);

}  // namespace cogverify
