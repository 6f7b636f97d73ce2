#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogverify/behavior.hpp"
#include "cogverify/model.hpp"
#include "cogverify/model_io.hpp"
#include "cogverify/qtable.hpp"
#include "cogverify/scenario.hpp"

namespace cogverify {

enum class HumanVariant { Underspecified, LowConfidence, UniqueClosest };

std::string_view to_string(HumanVariant v);
std::string_view to_string(DeadlockPolicy p);

struct HumanModelConfig {
    HumanVariant variant = HumanVariant::Underspecified;
    std::optional<double> temperature;  // overrides ScenarioSpec::temperature
    DeadlockPolicy deadlock = DeadlockPolicy::Block;
};

/// Packed situation: x (6 bits), y (6 bits), orientation (3 bits), present
/// features (48 bits). kStuckKey is the absorbing off-grid state.
using HumanKey = std::uint64_t;
inline constexpr HumanKey kStuckKey = ~HumanKey{0};

HumanKey encode_situation(const Situation& s);
Situation decode_situation(HumanKey k);

/// Robot positions with their deterministic (or imported) dynamics.
struct RobotModel {
    StochasticGame game;
    std::vector<HumanPosition> positions;  // per robot state
    GoalRegion goal;
};

struct BuiltModel {
    StochasticGame game;
    ScenarioSpec spec;
    HumanModelConfig config;
    std::vector<HumanKey> human;  // per state
    std::vector<std::uint32_t> robot;  // per state robot-model index; empty without robot
    std::vector<std::uint8_t> turn;    // per state, 0 = human moves next; empty without robot
    std::vector<std::uint8_t> flag;    // first-time copies: 1 + objective index; empty otherwise
    std::shared_ptr<const RobotModel> robot_model;

    bool has_robot() const { return robot_model != nullptr; }
    bool is_stuck(StateIndex s) const { return human[s] == kStuckKey; }
    Situation situation(StateIndex s) const { return decode_situation(human[s]); }
    std::optional<HumanPosition> robot_position(StateIndex s) const;

    /// e.g. "((2,1),2) {f2,f3,f4,f5,f6,f7,f8,f9}"; features by id.
    std::string describe_state(StateIndex s) const;
    /// Triple labels by feature id, e.g. "(f5,f8,f2)"; "-" marks an exhausted
    /// objective and "robot" the robot obstacle.
    std::string describe_action(std::uint32_t global_action) const;
};

/// Human behavior MDP over the situations reachable from (init_h, all features).
BuiltModel build_human_mdp(const ScenarioSpec& spec, const QTableSet& q,
                           const HumanModelConfig& cfg = {});

/// Same with the low-confidence variant selected.
BuiltModel build_human_mdp_low_confidence(const ScenarioSpec& spec, const QTableSet& q,
                                          HumanModelConfig cfg = {});

RobotModel build_robot_mdp(const RobotSpec& robot, const Environment& env);

/// Robot dynamics from the explicit format; every state needs a location line.
RobotModel import_robot_mdp(const ExplicitModel& m, const GoalRegion& goal);

/// Turn-based game; Box states carry human actions, Circle states robot actions.
/// Uses `robot` when given, else builds the robot MDP from spec.robot.
BuiltModel compose_sg(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg,
                      std::shared_ptr<const RobotModel> robot = nullptr);

/// 1 on every branch whose target has fewer features of the objective's type.
TransitionReward objective_reward(const BuiltModel& m, Objective o);

struct FlaggedModel {
    BuiltModel model;
    std::array<StateReward, 3> rewards;  // per objective
};

/// Every consuming branch is routed through a one-step copy of its target that
/// carries the first-visit flag; the copy's state reward is 1 for the consumed
/// type. Labels are false on copies.
FlaggedModel first_time_flags(const BuiltModel& m);

/// Every state assigned to Circle.
StochasticGame coalition_mdp(const StochasticGame& g);
BuiltModel coalition_mdp(const BuiltModel& m);

/// Keeps at each human state only the action whose triple is the tie-broken
/// closest pick per objective, restricted to the states still reachable.
BuiltModel resolve_underspecification(const BuiltModel& m, const QTableSet& q);

/// Keeps actions for which keep(state, global action) holds (at least one per
/// state must survive) and renumbers the reachable part breadth-first.
template <typename Keep>
BuiltModel restrict_actions(const BuiltModel& m, Keep&& keep);

/// Recomputes the standard labels (goal, stuck, consumed_<id>, ...).
void label_states(BuiltModel& m);

/// Names of all labels attached by label_states for this scenario.
std::vector<std::string> standard_labels(const ScenarioSpec& spec, bool with_robot);

namespace detail {
BuiltModel restrict_actions_impl(const BuiltModel& m, const std::vector<std::uint8_t>& keep_action);
}

template <typename Keep>
BuiltModel restrict_actions(const BuiltModel& m, Keep&& keep) {
    std::vector<std::uint8_t> k(m.game.num_actions(), 0);
    for (StateIndex s = 0; s < m.game.num_states(); ++s)
        for (auto a = m.game.action_begin(s); a < m.game.action_end(s); ++a) k[a] = keep(s, a) ? 1 : 0;
    return detail::restrict_actions_impl(m, k);
}

}  // namespace cogverify
