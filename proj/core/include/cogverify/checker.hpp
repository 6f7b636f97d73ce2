#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cogverify/model.hpp"

namespace cogverify {

using StateMask = std::vector<std::uint8_t>;

enum class Direction { Min, Max };

std::string_view to_string(Direction d);

struct SolverConfig {
    double epsilon = 1e-6;  // absolute sup-norm between successive iterates
    std::size_t max_iterations = 1'000'000;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Verdict {
    std::vector<double> values;  // per state
    Scheduler scheduler;         // per state local action; undecided (-1) where irrelevant
    std::size_t iterations = 0;
    bool converged = true;

    double at(StateIndex s) const { return values[s]; }
};

/// States whose optimal value is exactly 0 / exactly 1 from graph analysis.
/// `existential[s]` selects whether the reaching side chooses at s (max player)
/// or the opponent does.
StateMask qualitative_prob0(const StochasticGame& g, const StateMask& target,
                            const std::vector<std::uint8_t>& existential);
StateMask qualitative_prob1(const StochasticGame& g, const StateMask& target,
                            const std::vector<std::uint8_t>& existential);

/// Unbounded reachability on an MDP (player tags ignored).
Verdict reach(const StochasticGame& m, const StateMask& target, Direction dir,
              const SolverConfig& cfg = {});

/// k Bellman steps from the indicator of `target`; the scheduler holds the
/// first-step decision with k steps to go.
Verdict bounded_reach(const StochasticGame& m, const StateMask& target, std::size_t k, Direction dir,
                      const SolverConfig& cfg = {});

/// Expected reward accumulated until the first visit to `target`. kInfinity
/// where the target is not reached almost surely under the optimizing side.
Verdict expected_reward(const StochasticGame& m, const RewardFunction& rew, const StateMask& target,
                        Direction dir, const SolverConfig& cfg = {});

/// Circle maximizes, Box minimizes. The scheduler covers both players.
Verdict sg_maxmin_reach(const StochasticGame& g, const StateMask& target, const SolverConfig& cfg = {});

/// Reach probabilities of a Markov chain by value iteration.
Verdict chain_reach(const MarkovChain& mc, const StateMask& target, const SolverConfig& cfg = {});

/// Maximal end components of the sub-MDP given by `allowed` states and
/// `allowed_action` actions (actions are dropped when they can leave the
/// candidate set). Returns a component id per state, -1 outside any MEC.
std::vector<std::int32_t> maximal_end_components(const StochasticGame& g, const StateMask& allowed,
                                                 const std::vector<std::uint8_t>& allowed_action);

}  // namespace cogverify
