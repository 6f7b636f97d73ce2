#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cogverify/types.hpp"

namespace cogverify {

/// Circle states are controllable (robot / maximizer), Box states are not.
enum class Player : std::uint8_t { Circle = 0, Box = 1 };

enum class ActionKind : std::uint8_t { Triple, Movement, Robot, Stuck, Named };

enum class RobotAction : std::int16_t { TurnLeft = 0, TurnRight = 1, Forward = 2 };

/// Structured action payload. Triple holds feature slots (index, kNoFeature or
/// kRobotFeature) ordered AVOID, COLLECT, FOLLOW; Movement and Robot hold the
/// enumerator in `a`; Named indexes StochasticGame::names().
struct ActionLabel {
    ActionKind kind = ActionKind::Named;
    std::int16_t a = 0;
    std::int16_t b = 0;
    std::int16_t c = 0;

    static ActionLabel triple(int o, int l, int w) {
        return {ActionKind::Triple, static_cast<std::int16_t>(o), static_cast<std::int16_t>(l),
                static_cast<std::int16_t>(w)};
    }
    static ActionLabel movement(Movement m) {
        return {ActionKind::Movement, static_cast<std::int16_t>(m), 0, 0};
    }
    static ActionLabel robot(RobotAction r) {
        return {ActionKind::Robot, static_cast<std::int16_t>(r), 0, 0};
    }
    static ActionLabel stuck() { return {ActionKind::Stuck, 0, 0, 0}; }

    auto operator<=>(const ActionLabel&) const = default;
};

std::string_view to_string(RobotAction r);

using StateIndex = std::uint32_t;

/// Explicit turn-based stochastic game in compressed sparse row form. MDPs have
/// only Circle states; Markov chains additionally have one action per state.
class StochasticGame {
public:
    std::size_t num_states() const { return players_.size(); }
    std::size_t num_actions() const { return labels_.size(); }
    std::size_t num_branches() const { return targets_.size(); }
    StateIndex initial() const { return initial_; }

    Player player(StateIndex s) const { return players_[s]; }
    std::uint32_t action_begin(StateIndex s) const { return state_begin_[s]; }
    std::uint32_t action_end(StateIndex s) const { return state_begin_[s + 1]; }
    std::uint32_t action_count(StateIndex s) const { return action_end(s) - action_begin(s); }

    const ActionLabel& label(std::uint32_t a) const { return labels_[a]; }
    std::uint32_t branch_begin(std::uint32_t a) const { return action_begin_[a]; }
    std::uint32_t branch_end(std::uint32_t a) const { return action_begin_[a + 1]; }
    StateIndex target(std::uint32_t b) const { return targets_[b]; }
    double probability(std::uint32_t b) const { return probs_[b]; }

    const std::vector<std::string>& names() const { return names_; }
    std::string label_text(const ActionLabel& l) const;

    /// Named state sets (atomic propositions).
    const std::map<std::string, std::vector<std::uint8_t>>& atoms() const { return atoms_; }
    void set_atom(const std::string& name, std::vector<std::uint8_t> mask);
    bool has_atom(const std::string& name) const { return atoms_.count(name) != 0; }
    const std::vector<std::uint8_t>& atom(const std::string& name) const;

    bool is_mdp() const;
    bool is_chain() const;

    void set_all_players(Player p) { players_.assign(players_.size(), p); }

    bool operator==(const StochasticGame&) const = default;

private:
    friend class GameBuilder;

    std::vector<Player> players_;
    std::vector<std::uint32_t> state_begin_{0};
    std::vector<ActionLabel> labels_;
    std::vector<std::uint32_t> action_begin_{0};
    std::vector<StateIndex> targets_;
    std::vector<double> probs_;
    std::vector<std::string> names_;
    std::map<std::string, std::vector<std::uint8_t>> atoms_;
    StateIndex initial_ = 0;
};

using Mdp = StochasticGame;
using MarkovChain = StochasticGame;

/// Single-writer construction: states in index order, then their actions,
/// then each action's branches.
class GameBuilder {
public:
    explicit GameBuilder(std::size_t expected_states = 0);

    StateIndex add_state(Player p = Player::Circle);
    void add_action(const ActionLabel& l);
    void add_named_action(const std::string& name);
    /// Zero-probability branches are dropped; repeated targets within one
    /// action are merged.
    void add_branch(StateIndex target, double p);
    void set_initial(StateIndex s) { g_.initial_ = s; }
    std::size_t num_states() const { return g_.players_.size(); }

    StochasticGame finish();

private:
    StochasticGame g_;
    std::map<std::string, std::int16_t> name_index_;
};

struct StateReward {
    std::vector<double> values;  // per state
};
struct StateActionReward {
    std::vector<double> values;  // per global action index
};
struct TransitionReward {
    std::vector<double> values;  // per global branch index
};
using RewardFunction = std::variant<StateReward, StateActionReward, TransitionReward>;

/// Per-state local action index (0-based within the state's actions); -1
/// where the scheduler does not decide.
struct Scheduler {
    std::vector<std::int32_t> choice;
    bool operator==(const Scheduler&) const = default;
};

/// Markov chain keeping only the scheduled action at every state. States with
/// a single action may be left undecided.
MarkovChain induced_chain(const StochasticGame& g, const Scheduler& circle, const Scheduler& box);
MarkovChain induced_chain(const StochasticGame& g, const Scheduler& both);

/// Per-action reward of the chain induced by `both`, as a state-action reward
/// over the chain's actions.
StateActionReward induced_reward(const StochasticGame& g, const RewardFunction& r,
                                 const Scheduler& both);

/// Problems found, empty when the model is well formed.
std::vector<std::string> model_issues(const StochasticGame& g);
/// Throws ModelError listing all problems.
void validate_model(const StochasticGame& g);

StateActionReward rescale_transition_rewards(const StochasticGame& g, const TransitionReward& r);

/// Any reward variant as a state-action reward (state rewards are copied to
/// every action of the state).
StateActionReward as_state_action(const StochasticGame& g, const RewardFunction& r);

/// Throws ModelError when the reward's size does not match the model, or a
/// value is negative or not finite.
void check_reward(const StochasticGame& g, const RewardFunction& r);

/// Indicator mask helpers.
std::vector<std::uint8_t> mask_not(const std::vector<std::uint8_t>& a);
std::vector<std::uint8_t> mask_and(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);
std::vector<std::uint8_t> mask_or(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

}  // namespace cogverify
