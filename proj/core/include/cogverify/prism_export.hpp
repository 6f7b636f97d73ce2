#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogverify/builder.hpp"
#include "cogverify/qtable.hpp"
#include "cogverify/scenario.hpp"

namespace cogverify {

enum class RewardEncoding { Rescaled, FirstTimeFlag };

std::string_view to_string(RewardEncoding r);

struct EncodingOptions {
    bool use_named_formulas = true;
    bool short_variable_names = true;
    /// Merges commands of one position whose objective lookups are identical
    /// (typically the far bins of the avoidance tables).
    bool collapse_far_bins = true;
    /// Default: first-time flag with a robot, rescaled without.
    std::optional<RewardEncoding> reward_encoding;
    bool include_rewards = true;
};

struct EncodingStats {
    std::size_t commands = 0;  // every guarded command
    std::size_t lines = 0;
    std::size_t bytes = 0;
    std::size_t variables = 0;
    std::size_t positions = 0;            // human position blocks
    std::size_t triple_commands = 0;      // no slot of an objective with features is empty
    std::size_t exhausted_commands = 0;   // some objective ran out of features
    std::size_t other_commands = 0;       // stuck, movement and settle commands
    std::size_t max_triple_commands = 0;  // per position block
    std::size_t bound = 1;                // product over types of max(1, count)
    std::array<std::size_t, 3> feature_counts{};  // by FeatureType
    std::size_t positions_over_bound = 0;

    bool within_bound() const { return positions_over_bound == 0; }
};

struct PrismExport {
    std::string text;
    EncodingStats stats;
};

/// Human module alone (an MDP).
PrismExport export_human(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg = {},
                         const EncodingOptions& opts = {});

/// Human and robot modules with a global turn flag (a turn-based game).
PrismExport export_sg(const ScenarioSpec& spec, const QTableSet& q, const RobotSpec& robot,
                      const HumanModelConfig& cfg = {}, const EncodingOptions& opts = {});

/// Statistics of text produced by this module; throws InputError otherwise.
EncodingStats encoding_stats(std::string_view text);

}  // namespace cogverify
