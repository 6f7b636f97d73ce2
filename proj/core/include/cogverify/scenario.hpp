#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cogverify/geometry.hpp"
#include "cogverify/types.hpp"

namespace cogverify {

enum class RobotMode { Ignored, ObstacleFeature };
enum class TurnOrder { HumanFirst, RobotFirst };

std::string_view to_string(RobotMode m);
std::string_view to_string(TurnOrder t);

struct RobotSpec {
    HumanPosition start;  // orientation must be cardinal
    GoalRegion goal;
    RobotMode mode = RobotMode::Ignored;
    TurnOrder turn_order = TurnOrder::HumanFirst;
    bool operator==(const RobotSpec&) const = default;
};

struct ScenarioSpec {
    Environment env;
    HumanPosition init_h;
    double temperature = 1.0;
    ObjectiveWeights weights;
    std::optional<RobotSpec> robot;
    bool operator==(const ScenarioSpec&) const = default;
};

inline constexpr int kMaxGridSide = 64;

/// Every invariant violation of the environment, or empty when valid.
std::vector<std::string> environment_issues(const Environment& env);
/// Throws ValidationError listing all violations.
void validate_environment(const Environment& env);

std::vector<std::string> scenario_issues(const ScenarioSpec& spec);
void validate_scenario(const ScenarioSpec& spec);

/// Parses the YAML scenario schema. Syntax problems raise InputError with a
/// line/column; invariant violations raise ValidationError.
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Canonical YAML text; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cogverify
