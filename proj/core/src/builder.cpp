#include "cogverify/builder.hpp"

#include <absl/hash/hash.h>

#include <algorithm>
#include <deque>
#include <map>

#include "explore.hpp"

namespace cogverify {

using detail::Successor;

std::string_view to_string(HumanVariant v) {
    switch (v) {
    case HumanVariant::Underspecified: return "underspec";
    case HumanVariant::LowConfidence: return "lowconf";
    case HumanVariant::UniqueClosest: return "unique";
    }
    return "?";
}

std::string_view to_string(DeadlockPolicy p) { return p == DeadlockPolicy::Block ? "block" : "fall"; }

HumanKey encode_situation(const Situation& s) {
    const auto x = static_cast<HumanKey>(s.pos.loc.x);
    const auto y = static_cast<HumanKey>(s.pos.loc.y);
    const auto o = static_cast<HumanKey>(s.pos.orient.index());
    return x | (y << 6) | (o << 12) | (s.present.bits() << 15);
}

Situation decode_situation(HumanKey k) {
    if (k == kStuckKey) throw ModelError("the stuck state has no situation");
    Situation s;
    s.pos.loc.x = static_cast<int>(k & 63);
    s.pos.loc.y = static_cast<int>((k >> 6) & 63);
    s.pos.orient = Orientation(static_cast<int>((k >> 12) & 7));
    s.present = FeatureSet(k >> 15);
    return s;
}

namespace {

std::string feature_name(const Environment& env, int slot) {
    if (slot == kNoFeature) return "-";
    if (slot == kRobotFeature) return "robot";
    return "f" + std::to_string(env.features[static_cast<std::size_t>(slot)].id);
}

double effective_temperature(const ScenarioSpec& spec, const HumanModelConfig& cfg) {
    const double tau = cfg.temperature.value_or(spec.temperature);
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw ValidationError({"temperature must be positive and finite"});
    return tau;
}

/// Human action generation shared by the MDP and the game.
class HumanDynamics {
public:
    HumanDynamics(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg)
        : spec_(spec), q_(q), cfg_(cfg), tau_(effective_temperature(spec, cfg)) {}

    void expand(HumanKey k, std::optional<Location> robot, std::vector<Successor<HumanKey>>& out) const {
        if (k == kStuckKey) {
            out.push_back({ActionLabel::stuck(), {}, {{k, 1.0}}});
            return;
        }
        const Scene sc{decode_situation(k), robot};
        const Environment& env = spec_.env;
        const bool unique = cfg_.variant == HumanVariant::UniqueClosest;
        const Valuation v = combine(env, q_, spec_.weights, sc, cfg_.deadlock, unique);
        auto target = [&](Movement m) {
            return is_valid(sc.s.pos, m, env) ? encode_situation(effect(sc.s, m, env)) : kStuckKey;
        };
        if (cfg_.variant == HumanVariant::LowConfidence && !all_confident(v)) {
            for (auto m : kMovements) {
                if (cfg_.deadlock == DeadlockPolicy::Block && !is_valid(sc.s.pos, m, env)) continue;
                out.push_back({ActionLabel::movement(m), {}, {{target(m), 1.0}}});
            }
        } else {
            for (const auto& e : v) {
                const MovementVector p = softmax(e.values, tau_);
                Successor<HumanKey> act{ActionLabel::triple(e.triple[0], e.triple[1], e.triple[2]), {}, {}};
                for (auto m : kMovements)
                    if (p[index_of(m)] > 0.0) act.branches.emplace_back(target(m), p[index_of(m)]);
                out.push_back(std::move(act));
            }
        }
        if (out.empty()) out.push_back({ActionLabel::stuck(), {}, {{k, 1.0}}});
    }

private:
    const ScenarioSpec& spec_;
    const QTableSet& q_;
    HumanModelConfig cfg_;
    double tau_;
};

struct SgKey {
    HumanKey h;
    std::uint32_t rt;  // robot state * 2 + turn
    bool operator==(const SgKey&) const = default;
    template <typename H>
    friend H AbslHashValue(H state, const SgKey& k) {
        return H::combine(std::move(state), k.h, k.rt);
    }
};

bool dead_end(const Environment& env, const HumanPosition& p) {
    for (auto m : kMovements)
        if (is_valid(p, m, env)) return false;
    return true;
}

}  // namespace

std::optional<HumanPosition> BuiltModel::robot_position(StateIndex s) const {
    if (!robot_model) return std::nullopt;
    return robot_model->positions[robot[s]];
}

std::string BuiltModel::describe_state(StateIndex s) const {
    std::string out;
    if (is_stuck(s)) {
        out = "stuck";
    } else {
        const Situation sit = situation(s);
        out = to_string(sit.pos) + " {";
        bool first = true;
        for (std::size_t i = 0; i < spec.env.features.size(); ++i)
            if (sit.present.contains(static_cast<int>(i))) {
                out += (first ? "f" : ",f") + std::to_string(spec.env.features[i].id);
                first = false;
            }
        out += "}";
    }
    if (robot_model)
        out += " robot " + to_string(robot_model->positions[robot[s]]) +
               (turn[s] == 0 ? " next=human" : " next=robot");
    if (!flag.empty() && flag[s])
        out += " first=" + std::string(to_string(static_cast<Objective>(flag[s] - 1)));
    return out;
}

std::string BuiltModel::describe_action(std::uint32_t a) const {
    const ActionLabel& l = game.label(a);
    if (l.kind != ActionKind::Triple) return game.label_text(l);
    return "(" + feature_name(spec.env, l.a) + "," + feature_name(spec.env, l.b) + "," +
           feature_name(spec.env, l.c) + ")";
}

std::vector<std::string> standard_labels(const ScenarioSpec& spec, bool with_robot) {
    std::vector<std::string> out{"init", "goal", "stuck", "all_litter", "all_waypoints", "obstacle_hit"};
    if (with_robot) {
        out.push_back("robot_goal");
        out.push_back("collision");
        out.push_back("human_turn");
    }
    for (const auto& f : spec.env.features) out.push_back("consumed_" + std::to_string(f.id));
    return out;
}

void label_states(BuiltModel& m) {
    const auto n = m.game.num_states();
    const Environment& env = m.spec.env;
    std::map<std::string, std::vector<std::uint8_t>> atoms;
    for (const auto& name : standard_labels(m.spec, m.has_robot())) atoms[name].assign(n, 0);
    std::uint64_t litter = 0, wpt = 0, obst = 0;
    for (std::size_t i = 0; i < env.features.size(); ++i) {
        const auto bit = std::uint64_t{1} << i;
        switch (env.features[i].type) {
        case FeatureType::Litter: litter |= bit; break;
        case FeatureType::Waypoint: wpt |= bit; break;
        case FeatureType::Obstacle: obst |= bit; break;
        }
    }
    const std::uint64_t all = FeatureSet::all(env.features.size()).bits();
    atoms["init"][m.game.initial()] = 1;
    for (StateIndex s = 0; s < n; ++s) {
        if (!m.flag.empty() && m.flag[s]) continue;
        const std::optional<HumanPosition> rp = m.robot_position(s);
        if (m.has_robot()) {
            atoms["human_turn"][s] = m.turn[s] == 0;
            atoms["robot_goal"][s] = m.robot_model->goal.contains(rp->loc);
        }
        if (m.is_stuck(s)) {
            atoms["stuck"][s] = 1;
            continue;
        }
        const Situation sit = m.situation(s);
        const std::uint64_t present = sit.present.bits();
        atoms["goal"][s] = env.goal.contains(sit.pos.loc);
        atoms["stuck"][s] = dead_end(env, sit.pos);
        atoms["all_litter"][s] = (present & litter) == 0;
        atoms["all_waypoints"][s] = (present & wpt) == 0;
        atoms["obstacle_hit"][s] = (present & obst) != obst;
        if (rp) atoms["collision"][s] = rp->loc == sit.pos.loc;
        for (std::size_t i = 0; i < env.features.size(); ++i)
            if (!((present & all) >> i & 1))
                atoms["consumed_" + std::to_string(env.features[i].id)][s] = 1;
    }
    for (auto& [name, mask] : atoms) m.game.set_atom(name, std::move(mask));
}

BuiltModel build_human_mdp(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg) {
    validate_scenario(spec);
    const HumanDynamics dyn(spec, q, cfg);
    const Situation init{spec.init_h, FeatureSet::all(spec.env.features.size())};
    auto ex = detail::explore(
        encode_situation(init),
        [&](HumanKey k, std::vector<Successor<HumanKey>>& out) { dyn.expand(k, std::nullopt, out); },
        [](HumanKey) { return Player::Circle; });
    BuiltModel m;
    m.game = std::move(ex.game);
    m.spec = spec;
    m.config = cfg;
    m.human = std::move(ex.keys);
    label_states(m);
    return m;
}

BuiltModel build_human_mdp_low_confidence(const ScenarioSpec& spec, const QTableSet& q,
                                          HumanModelConfig cfg) {
    cfg.variant = HumanVariant::LowConfidence;
    return build_human_mdp(spec, q, cfg);
}

RobotModel build_robot_mdp(const RobotSpec& robot, const Environment& env) {
    if (!env.grid.contains(robot.start.loc)) throw ValidationError({"robot start off-grid"});
    if (!robot.start.orient.is_cardinal())
        throw ValidationError({"robot orientation must be one of 0, 2, 4, 6"});
    auto pack = [](const HumanPosition& p) {
        return static_cast<std::uint32_t>((p.loc.x * 64 + p.loc.y) * 8 + p.orient.index());
    };
    auto unpack = [](std::uint32_t k) {
        return HumanPosition{{static_cast<int>(k / 8 / 64), static_cast<int>(k / 8 % 64)},
                             Orientation(static_cast<int>(k % 8))};
    };
    auto ex = detail::explore(
        pack(robot.start),
        [&](std::uint32_t k, std::vector<Successor<std::uint32_t>>& out) {
            const HumanPosition p = unpack(k);
            out.push_back({ActionLabel::robot(RobotAction::TurnLeft), {},
                           {{pack({p.loc, p.orient.rotated(2)}), 1.0}}});
            out.push_back({ActionLabel::robot(RobotAction::TurnRight), {},
                           {{pack({p.loc, p.orient.rotated(-2)}), 1.0}}});
            const auto [dx, dy] = direction_vector(p.orient);
            const Location next{p.loc.x + dx, p.loc.y + dy};
            if (env.grid.contains(next))
                out.push_back({ActionLabel::robot(RobotAction::Forward), {}, {{pack({next, p.orient}), 1.0}}});
        },
        [](std::uint32_t) { return Player::Circle; });
    RobotModel r;
    r.game = std::move(ex.game);
    for (auto k : ex.keys) r.positions.push_back(unpack(k));
    r.goal = robot.goal;
    std::vector<std::uint8_t> goal(r.positions.size());
    for (std::size_t i = 0; i < goal.size(); ++i) goal[i] = robot.goal.contains(r.positions[i].loc);
    r.game.set_atom("robot_goal", std::move(goal));
    return r;
}

RobotModel import_robot_mdp(const ExplicitModel& m, const GoalRegion& goal) {
    RobotModel r;
    r.game = m.game;
    r.game.set_all_players(Player::Circle);
    r.goal = goal;
    if (m.locations.size() != m.game.num_states())
        throw InputError("robot model needs a location line for every state");
    for (std::size_t s = 0; s < m.locations.size(); ++s) {
        if (!m.locations[s]) throw InputError("robot model state " + std::to_string(s) + " has no location");
        r.positions.push_back(*m.locations[s]);
    }
    return r;
}

BuiltModel compose_sg(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg,
                      std::shared_ptr<const RobotModel> robot) {
    validate_scenario(spec);
    if (!robot) {
        if (!spec.robot) throw ValidationError({"no robot in scenario"});
        robot = std::make_shared<RobotModel>(build_robot_mdp(*spec.robot, spec.env));
    }
    const RobotMode mode = spec.robot ? spec.robot->mode : RobotMode::Ignored;
    const TurnOrder order = spec.robot ? spec.robot->turn_order : TurnOrder::HumanFirst;
    for (const auto& p : robot->positions)
        if (!spec.env.grid.contains(p.loc)) throw ValidationError({"robot model position off-grid"});
    const HumanPosition rstart = robot->positions[robot->game.initial()];
    if (mode == RobotMode::ObstacleFeature && rstart.loc == spec.init_h.loc)
        throw ValidationError({"robot and human start on the same cell in obstacle mode"});

    const HumanDynamics dyn(spec, q, cfg);
    const RobotModel& rm = *robot;
    const Situation init{spec.init_h, FeatureSet::all(spec.env.features.size())};
    const SgKey start{encode_situation(init),
                      rm.game.initial() * 2 + (order == TurnOrder::HumanFirst ? 0u : 1u)};
    auto ex = detail::explore(
        start,
        [&](const SgKey& k, std::vector<Successor<SgKey>>& out) {
            const std::uint32_t r = k.rt / 2;
            if (k.rt % 2 == 0) {
                std::optional<Location> obstacle;
                if (mode == RobotMode::ObstacleFeature) obstacle = rm.positions[r].loc;
                std::vector<Successor<HumanKey>> hs;
                dyn.expand(k.h, obstacle, hs);
                for (auto& a : hs) {
                    Successor<SgKey> sa{a.label, {}, {}};
                    for (const auto& [h, p] : a.branches) sa.branches.push_back({{h, r * 2 + 1}, p});
                    out.push_back(std::move(sa));
                }
            } else {
                for (auto a = rm.game.action_begin(r); a < rm.game.action_end(r); ++a) {
                    const ActionLabel& l = rm.game.label(a);
                    Successor<SgKey> sa{l, l.kind == ActionKind::Named ? rm.game.label_text(l) : "", {}};
                    for (auto b = rm.game.branch_begin(a); b < rm.game.branch_end(a); ++b)
                        sa.branches.push_back({{k.h, rm.game.target(b) * 2}, rm.game.probability(b)});
                    out.push_back(std::move(sa));
                }
            }
        },
        [](const SgKey& k) { return k.rt % 2 == 0 ? Player::Box : Player::Circle; });

    BuiltModel m;
    m.game = std::move(ex.game);
    m.spec = spec;
    m.config = cfg;
    m.robot_model = robot;
    m.human.reserve(ex.keys.size());
    m.robot.reserve(ex.keys.size());
    m.turn.reserve(ex.keys.size());
    for (const auto& k : ex.keys) {
        m.human.push_back(k.h);
        m.robot.push_back(k.rt / 2);
        m.turn.push_back(static_cast<std::uint8_t>(k.rt % 2));
    }
    label_states(m);
    return m;
}

TransitionReward objective_reward(const BuiltModel& m, Objective o) {
    std::uint64_t mask = 0;
    const auto& feats = m.spec.env.features;
    for (std::size_t i = 0; i < feats.size(); ++i)
        if (feats[i].type == feature_type_of(o)) mask |= std::uint64_t{1} << i;
    TransitionReward r;
    r.values.assign(m.game.num_branches(), 0.0);
    for (StateIndex s = 0; s < m.game.num_states(); ++s) {
        if (m.is_stuck(s)) continue;
        const std::uint64_t before = m.situation(s).present.bits() & mask;
        for (auto a = m.game.action_begin(s); a < m.game.action_end(s); ++a)
            for (auto b = m.game.branch_begin(a); b < m.game.branch_end(a); ++b) {
                const StateIndex t = m.game.target(b);
                if (m.is_stuck(t)) continue;
                if ((m.situation(t).present.bits() & mask) != before) r.values[b] = 1.0;
            }
    }
    return r;
}

FlaggedModel first_time_flags(const BuiltModel& m) {
    const auto& g = m.game;
    const auto n = static_cast<StateIndex>(g.num_states());
    const auto& feats = m.spec.env.features;
    auto consumed = [&](StateIndex s, StateIndex t) -> int {
        if (m.is_stuck(s) || m.is_stuck(t)) return -1;
        const std::uint64_t gone = m.situation(s).present.bits() & ~m.situation(t).present.bits();
        if (gone == 0) return -1;
        return static_cast<int>(index_of(objective_of(feats[static_cast<std::size_t>(std::countr_zero(gone))].type)));
    };

    std::map<std::pair<StateIndex, int>, StateIndex> copies;
    std::vector<std::pair<StateIndex, int>> copy_list;
    for (StateIndex s = 0; s < n; ++s)
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a)
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) {
                const int k = consumed(s, g.target(b));
                if (k < 0) continue;
                const auto key = std::make_pair(g.target(b), k);
                if (copies.try_emplace(key, n + static_cast<StateIndex>(copy_list.size())).second)
                    copy_list.push_back(key);
            }

    GameBuilder gb(n + copy_list.size());
    for (StateIndex s = 0; s < n; ++s) {
        gb.add_state(g.player(s));
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            const ActionLabel& l = g.label(a);
            if (l.kind == ActionKind::Named) gb.add_named_action(g.label_text(l));
            else gb.add_action(l);
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) {
                const StateIndex t = g.target(b);
                const int k = consumed(s, t);
                gb.add_branch(k < 0 ? t : copies.at({t, k}), g.probability(b));
            }
        }
    }
    for (const auto& [t, k] : copy_list) {
        gb.add_state(g.player(t));
        gb.add_named_action("settle");
        gb.add_branch(t, 1.0);
    }
    gb.set_initial(g.initial());

    FlaggedModel out;
    BuiltModel& fm = out.model;
    fm.game = gb.finish();
    fm.spec = m.spec;
    fm.config = m.config;
    fm.robot_model = m.robot_model;
    fm.human = m.human;
    fm.robot = m.robot;
    fm.turn = m.turn;
    fm.flag.assign(n, 0);
    for (auto& r : out.rewards) r.values.assign(fm.game.num_states(), 0.0);
    for (const auto& [t, k] : copy_list) {
        fm.human.push_back(m.human[t]);
        if (!m.robot.empty()) fm.robot.push_back(m.robot[t]);
        if (!m.turn.empty()) fm.turn.push_back(m.turn[t]);
        fm.flag.push_back(static_cast<std::uint8_t>(k + 1));
        out.rewards[static_cast<std::size_t>(k)].values[fm.human.size() - 1] = 1.0;
    }
    for (const auto& [name, mask] : g.atoms()) {
        auto ext = mask;
        ext.resize(fm.game.num_states(), 0);
        fm.game.set_atom(name, std::move(ext));
    }
    return out;
}

StochasticGame coalition_mdp(const StochasticGame& g) {
    StochasticGame out = g;
    out.set_all_players(Player::Circle);
    return out;
}

BuiltModel coalition_mdp(const BuiltModel& m) {
    BuiltModel out = m;
    out.game.set_all_players(Player::Circle);
    return out;
}

namespace detail {

BuiltModel restrict_actions_impl(const BuiltModel& m, const std::vector<std::uint8_t>& keep) {
    const auto& g = m.game;
    constexpr StateIndex kUnseen = ~StateIndex{0};
    std::vector<StateIndex> renum(g.num_states(), kUnseen);
    std::vector<StateIndex> order;
    renum[g.initial()] = 0;
    order.push_back(g.initial());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const StateIndex s = order[i];
        bool any = false;
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            if (!keep[a]) continue;
            any = true;
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                if (renum[g.target(b)] == kUnseen) {
                    renum[g.target(b)] = static_cast<StateIndex>(order.size());
                    order.push_back(g.target(b));
                }
        }
        if (!any) throw ModelError("restriction removes every action of state " + std::to_string(s));
    }
    GameBuilder gb(order.size());
    BuiltModel out;
    for (StateIndex s : order) {
        gb.add_state(g.player(s));
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            if (!keep[a]) continue;
            const ActionLabel& l = g.label(a);
            if (l.kind == ActionKind::Named) gb.add_named_action(g.label_text(l));
            else gb.add_action(l);
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                gb.add_branch(renum[g.target(b)], g.probability(b));
        }
        out.human.push_back(m.human[s]);
        if (!m.robot.empty()) out.robot.push_back(m.robot[s]);
        if (!m.turn.empty()) out.turn.push_back(m.turn[s]);
        if (!m.flag.empty()) out.flag.push_back(m.flag[s]);
    }
    gb.set_initial(0);
    out.game = gb.finish();
    out.spec = m.spec;
    out.config = m.config;
    out.robot_model = m.robot_model;
    for (const auto& [name, mask] : g.atoms()) {
        std::vector<std::uint8_t> sub(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) sub[i] = mask[order[i]];
        out.game.set_atom(name, std::move(sub));
    }
    if (out.game.has_atom("init")) {
        std::vector<std::uint8_t> init(order.size(), 0);
        init[0] = 1;
        out.game.set_atom("init", std::move(init));
    }
    return out;
}

}  // namespace detail

BuiltModel resolve_underspecification(const BuiltModel& m, const QTableSet&) {
    const Environment& env = m.spec.env;
    const bool obstacle = m.has_robot() && m.spec.robot && m.spec.robot->mode == RobotMode::ObstacleFeature;
    std::vector<std::uint8_t> keep(m.game.num_actions(), 1);
    for (StateIndex s = 0; s < m.game.num_states(); ++s) {
        if (m.is_stuck(s) || (!m.turn.empty() && m.turn[s] != 0) || (!m.flag.empty() && m.flag[s]))
            continue;
        Scene sc{m.situation(s), std::nullopt};
        if (obstacle) sc.robot_obstacle = m.robot_position(s)->loc;
        const ActionLabel want = ActionLabel::triple(unique_closest(env, sc, Objective::Avoid),
                                                     unique_closest(env, sc, Objective::Collect),
                                                     unique_closest(env, sc, Objective::Follow));
        bool found = false;
        for (auto a = m.game.action_begin(s); a < m.game.action_end(s); ++a)
            found = found || m.game.label(a) == want;
        if (!found) continue;
        for (auto a = m.game.action_begin(s); a < m.game.action_end(s); ++a)
            keep[a] = m.game.label(a) == want;
    }
    return detail::restrict_actions_impl(m, keep);
}

}  // namespace cogverify
