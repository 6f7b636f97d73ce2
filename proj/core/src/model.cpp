#include "cogverify/model.hpp"

#include <cmath>
#include <sstream>

namespace cogverify {

std::string_view to_string(RobotAction r) {
    switch (r) {
    case RobotAction::TurnLeft: return "TURN_LEFT";
    case RobotAction::TurnRight: return "TURN_RIGHT";
    case RobotAction::Forward: return "FORWARD";
    }
    return "?";
}

namespace {

std::string slot_text(int slot) {
    if (slot == -1) return "-";
    if (slot == -2) return "R";
    return std::to_string(slot);
}

}  // namespace

std::string StochasticGame::label_text(const ActionLabel& l) const {
    switch (l.kind) {
    case ActionKind::Triple:
        return "(" + slot_text(l.a) + "," + slot_text(l.b) + "," + slot_text(l.c) + ")";
    case ActionKind::Movement: return std::string(to_string(static_cast<Movement>(l.a)));
    case ActionKind::Robot: return std::string(to_string(static_cast<RobotAction>(l.a)));
    case ActionKind::Stuck: return "stuck";
    case ActionKind::Named: return names_.at(static_cast<std::size_t>(l.a));
    }
    return "?";
}

void StochasticGame::set_atom(const std::string& name, std::vector<std::uint8_t> mask) {
    if (mask.size() != num_states())
        throw ModelError("atom '" + name + "' has the wrong number of states");
    atoms_[name] = std::move(mask);
}

const std::vector<std::uint8_t>& StochasticGame::atom(const std::string& name) const {
    const auto it = atoms_.find(name);
    if (it == atoms_.end()) throw ModelError("unknown label '" + name + "'");
    return it->second;
}

bool StochasticGame::is_mdp() const {
    for (auto p : players_)
        if (p != players_.front()) return false;
    return true;
}

bool StochasticGame::is_chain() const {
    for (StateIndex s = 0; s < num_states(); ++s)
        if (action_count(s) != 1) return false;
    return true;
}

GameBuilder::GameBuilder(std::size_t expected_states) {
    g_.players_.reserve(expected_states);
    g_.state_begin_.reserve(expected_states + 1);
}

StateIndex GameBuilder::add_state(Player p) {
    g_.players_.push_back(p);
    g_.state_begin_.push_back(g_.state_begin_.back());
    return static_cast<StateIndex>(g_.players_.size() - 1);
}

void GameBuilder::add_action(const ActionLabel& l) {
    if (g_.players_.empty()) throw ModelError("action added before any state");
    g_.labels_.push_back(l);
    g_.action_begin_.push_back(g_.action_begin_.back());
    ++g_.state_begin_.back();
}

void GameBuilder::add_named_action(const std::string& name) {
    auto [it, inserted] = name_index_.try_emplace(name, static_cast<std::int16_t>(g_.names_.size()));
    if (inserted) g_.names_.push_back(name);
    add_action({ActionKind::Named, it->second, 0, 0});
}

void GameBuilder::add_branch(StateIndex target, double p) {
    if (g_.labels_.empty()) throw ModelError("branch added before any action");
    if (p == 0.0) return;
    for (auto b = g_.action_begin_[g_.labels_.size() - 1]; b < g_.action_begin_.back(); ++b)
        if (g_.targets_[b] == target) {
            g_.probs_[b] += p;
            return;
        }
    g_.targets_.push_back(target);
    g_.probs_.push_back(p);
    ++g_.action_begin_.back();
}

StochasticGame GameBuilder::finish() {
    StochasticGame out = std::move(g_);
    g_ = StochasticGame();
    name_index_.clear();
    return out;
}

namespace {

std::int32_t decided(const StochasticGame& g, const Scheduler& sch, StateIndex s) {
    const std::int32_t c = s < sch.choice.size() ? sch.choice[s] : -1;
    if (c >= 0) {
        if (static_cast<std::uint32_t>(c) >= g.action_count(s))
            throw ModelError("scheduler picks action " + std::to_string(c) + " at state " +
                             std::to_string(s) + " which has " + std::to_string(g.action_count(s)));
        return c;
    }
    if (g.action_count(s) == 1) return 0;
    throw ModelError("scheduler missing a choice at state " + std::to_string(s));
}

}  // namespace

MarkovChain induced_chain(const StochasticGame& g, const Scheduler& circle, const Scheduler& box) {
    Scheduler both;
    both.choice.resize(g.num_states(), -1);
    for (StateIndex s = 0; s < g.num_states(); ++s) {
        const Scheduler& own = g.player(s) == Player::Circle ? circle : box;
        both.choice[s] = s < own.choice.size() ? own.choice[s] : -1;
    }
    return induced_chain(g, both);
}

MarkovChain induced_chain(const StochasticGame& g, const Scheduler& both) {
    GameBuilder b(g.num_states());
    for (StateIndex s = 0; s < g.num_states(); ++s) {
        b.add_state(g.player(s));
        const auto a = g.action_begin(s) + static_cast<std::uint32_t>(decided(g, both, s));
        const auto& l = g.label(a);
        if (l.kind == ActionKind::Named) b.add_named_action(g.label_text(l));
        else b.add_action(l);
        for (auto br = g.branch_begin(a); br < g.branch_end(a); ++br)
            b.add_branch(g.target(br), g.probability(br));
    }
    b.set_initial(g.initial());
    MarkovChain mc = b.finish();
    for (const auto& [name, mask] : g.atoms()) mc.set_atom(name, mask);
    return mc;
}

StateActionReward induced_reward(const StochasticGame& g, const RewardFunction& r,
                                 const Scheduler& both) {
    const StateActionReward full = as_state_action(g, r);
    StateActionReward out;
    out.values.resize(g.num_states());
    for (StateIndex s = 0; s < g.num_states(); ++s)
        out.values[s] = full.values[g.action_begin(s) + static_cast<std::uint32_t>(decided(g, both, s))];
    return out;
}

std::vector<std::string> model_issues(const StochasticGame& g) {
    std::vector<std::string> issues;
    const auto n = g.num_states();
    if (n == 0) {
        issues.push_back("model has no states");
        return issues;
    }
    if (g.initial() >= n) issues.push_back("initial state out of range");
    for (StateIndex s = 0; s < n; ++s) {
        if (g.action_count(s) == 0) issues.push_back("state " + std::to_string(s) + " has no actions");
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            double sum = 0.0;
            bool bad_branch = false;
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) {
                const double p = g.probability(b);
                if (!(p > 0.0) || p > 1.0 + 1e-12 || g.target(b) >= n) bad_branch = true;
                sum += p;
            }
            const std::string where = "state " + std::to_string(s) + " action " +
                                      std::to_string(a - g.action_begin(s)) + " (" +
                                      g.label_text(g.label(a)) + ")";
            if (bad_branch) issues.push_back(where + " has an invalid branch");
            if (std::abs(sum - 1.0) > 1e-9) {
                std::ostringstream ss;
                ss.precision(12);
                ss << where << " has probability sum " << sum;
                issues.push_back(ss.str());
            }
        }
    }
    for (const auto& [name, mask] : g.atoms())
        if (mask.size() != n) issues.push_back("atom '" + name + "' has the wrong size");
    return issues;
}

void validate_model(const StochasticGame& g) {
    const auto issues = model_issues(g);
    if (issues.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& i : issues) msg += "\n  " + i;
    throw ModelError(msg);
}

StateActionReward rescale_transition_rewards(const StochasticGame& g, const TransitionReward& r) {
    if (r.values.size() != g.num_branches()) throw ModelError("transition reward size mismatch");
    StateActionReward out;
    out.values.assign(g.num_actions(), 0.0);
    for (std::uint32_t a = 0; a < g.num_actions(); ++a)
        for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
            out.values[a] += g.probability(b) * r.values[b];
    return out;
}

StateActionReward as_state_action(const StochasticGame& g, const RewardFunction& r) {
    check_reward(g, r);
    if (const auto* t = std::get_if<TransitionReward>(&r)) return rescale_transition_rewards(g, *t);
    if (const auto* sa = std::get_if<StateActionReward>(&r)) return *sa;
    const auto& st = std::get<StateReward>(r);
    StateActionReward out;
    out.values.resize(g.num_actions());
    for (StateIndex s = 0; s < g.num_states(); ++s)
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) out.values[a] = st.values[s];
    return out;
}

void check_reward(const StochasticGame& g, const RewardFunction& r) {
    const std::vector<double>* v = nullptr;
    std::size_t expected = 0;
    if (const auto* st = std::get_if<StateReward>(&r)) {
        v = &st->values;
        expected = g.num_states();
    } else if (const auto* sa = std::get_if<StateActionReward>(&r)) {
        v = &sa->values;
        expected = g.num_actions();
    } else {
        v = &std::get<TransitionReward>(r).values;
        expected = g.num_branches();
    }
    if (v->size() != expected)
        throw ModelError("reward has " + std::to_string(v->size()) + " entries, model needs " +
                         std::to_string(expected));
    for (double x : *v)
        if (!(x >= 0.0) || !std::isfinite(x)) throw ModelError("rewards must be finite and nonnegative");
}

std::vector<std::uint8_t> mask_not(const std::vector<std::uint8_t>& a) {
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = !a[i];
    return out;
}

std::vector<std::uint8_t> mask_and(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
    return out;
}

std::vector<std::uint8_t> mask_or(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
    return out;
}

}  // namespace cogverify
