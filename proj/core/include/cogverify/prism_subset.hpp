#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cogverify/model.hpp"

namespace cogverify {

/// Explicit-state build of the guarded-command subset that prism_export
/// emits: constants, formulas, global and module variables (bounded integers
/// and booleans), unsynchronized commands, reward structures, labels and
/// player blocks. Used to cross-check exports without an external tool.
struct PrismExplored {
    StochasticGame game;  // labels become atoms
    bool is_game = false;
    std::vector<std::string> variables;
    std::vector<std::vector<int>> valuations;  // per state
    std::vector<std::uint32_t> action_command;  // per global action: command index in the text
    std::map<std::string, StateActionReward> rewards;
};

/// Throws InputError on text outside the subset and ModelError on deadlocks,
/// out-of-range updates or distributions not summing to 1 (within 1e-9).
PrismExplored explore_prism(std::string_view text, std::size_t max_states = 20'000'000);

}  // namespace cogverify
