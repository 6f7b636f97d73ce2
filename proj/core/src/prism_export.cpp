#include "cogverify/prism_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "cogverify/behavior.hpp"
#include "cogverify/geometry.hpp"

namespace cogverify {

std::string_view to_string(RewardEncoding r) {
    return r == RewardEncoding::Rescaled ? "rescaled" : "first_time";
}

namespace {

constexpr std::string_view kMagic = "// cogverify-prism 1";
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Names {
    std::string x, y, o, dead, ft, turn, rx, ry, ro;
    std::vector<std::string> b;
    bool short_names = true;

    std::string position(const HumanPosition& p) const {
        return (short_names ? "p" : "human_at_") + std::to_string(p.loc.x) + "_" + std::to_string(p.loc.y) + "_" +
               std::to_string(p.orient.index());
    }
};

Names make_names(const Environment& env, bool short_names) {
    Names n;
    n.short_names = short_names;
    if (short_names) {
        n.x = "x", n.y = "y", n.o = "o", n.dead = "d", n.ft = "ft", n.turn = "t";
        n.rx = "rx", n.ry = "ry", n.ro = "ro";
        for (std::size_t i = 0; i < env.features.size(); ++i) n.b.push_back("b" + std::to_string(i));
    } else {
        n.x = "human_x", n.y = "human_y", n.o = "human_orientation", n.dead = "human_stuck";
        n.ft = "first_time", n.turn = "turn", n.rx = "robot_x", n.ry = "robot_y", n.ro = "robot_orientation";
        for (const auto& f : env.features)
            n.b.push_back("present_" + std::string(to_string(f.type)) + "_" + std::to_string(f.id));
    }
    return n;
}

/// Literal codes: 2i = feature i absent, 2i+1 = feature i present.
using Conj = std::vector<int>;

struct Candidate {
    int slot = kNoFeature;
    Conj lits;
    MovementVector values{0, 0, 0};
    bool confident = true;
};

struct Group {
    std::string label;
    std::string guard;  // empty = true
    MovementVector values{0, 0, 0};
    bool confident = true;
    bool exhausted = false;
};

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += sep;
        s += parts[i];
    }
    return s;
}

class Emitter {
public:
    Emitter(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg, const EncodingOptions& opts,
            const RobotSpec* robot)
        : spec_(spec), env_(spec.env), q_(q), cfg_(cfg), opts_(opts), robot_(robot),
          names_(make_names(spec.env, opts.short_variable_names)) {
        validate_scenario(spec);
        tau_ = cfg.temperature.value_or(spec.temperature);
        if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ValidationError({"temperature must be positive and finite"});
        reward_ = opts.reward_encoding.value_or(robot ? RewardEncoding::FirstTimeFlag : RewardEncoding::Rescaled);
        if (robot && opts.include_rewards && reward_ == RewardEncoding::Rescaled)
            throw ValidationError({"rescaled rewards need named commands, which are not supported with a robot"});
        if (robot) {
            if (!env_.grid.contains(robot->start.loc)) throw ValidationError({"robot start off-grid"});
            if (!robot->start.orient.is_cardinal())
                throw ValidationError({"robot orientation must be one of 0, 2, 4, 6"});
            if (robot->mode == RobotMode::ObstacleFeature && robot->start.loc == spec.init_h.loc)
                throw ValidationError({"robot and human start on the same cell in obstacle mode"});
        }
        ft_ = opts.include_rewards && reward_ == RewardEncoding::FirstTimeFlag;
        named_ = opts.include_rewards && reward_ == RewardEncoding::Rescaled;
        fall_ = cfg.deadlock == DeadlockPolicy::Fall;
        obstacle_mode_ = robot && robot->mode == RobotMode::ObstacleFeature;
    }

    std::string run() {
        header();
        human_module();
        if (robot_) robot_module();
        rewards();
        labels();
        if (robot_) out_ += "\nplayer robot\n  robot\nendplayer\n\nplayer human\n  human\nendplayer\n";
        return std::move(out_);
    }

private:
    const ScenarioSpec& spec_;
    const Environment& env_;
    const QTableSet& q_;
    HumanModelConfig cfg_;
    EncodingOptions opts_;
    const RobotSpec* robot_;
    Names names_;
    double tau_ = 1.0;
    RewardEncoding reward_ = RewardEncoding::Rescaled;
    bool ft_ = false, named_ = false, fall_ = false, obstacle_mode_ = false;
    std::string out_;
    std::size_t next_command_ = 0;
    std::array<std::string, 3> reward_items_;

    std::string lit(int code) const {
        const auto& b = names_.b[static_cast<std::size_t>(code / 2)];
        return code % 2 ? b : "!" + b;
    }
    std::string conj_text(const Conj& c) const {
        std::vector<std::string> parts;
        for (int l : c) parts.push_back(lit(l));
        return join(parts, " & ");
    }

    void header() {
        std::size_t counts[3] = {env_.count(FeatureType::Obstacle), env_.count(FeatureType::Litter),
                                 env_.count(FeatureType::Waypoint)};
        out_ += kMagic;
        out_ += "\n// grid " + std::to_string(env_.grid.width) + " " + std::to_string(env_.grid.height) + "\n";
        out_ += "// features obstacle=" + std::to_string(counts[0]) + " litter=" + std::to_string(counts[1]) +
                " waypoint=" + std::to_string(counts[2]) + " robot_obstacle=" + (obstacle_mode_ ? "1" : "0") + "\n";
        out_ += "// variant " + std::string(to_string(cfg_.variant)) + " deadlock " +
                std::string(to_string(cfg_.deadlock)) + " tau " + num(tau_) + " rewards " +
                (opts_.include_rewards ? std::string(to_string(reward_)) : "none") + "\n";
        out_ += robot_ ? "smg\n\n" : "mdp\n\n";
        for (const auto& f : env_.features) {
            const std::string base = "f" + std::to_string(f.id);
            out_ += "const int " + base + "_x = " + std::to_string(f.loc.x) + ";\n";
            out_ += "const int " + base + "_y = " + std::to_string(f.loc.y) + ";\n";
        }
        if (!env_.features.empty()) out_ += "\n";
        if (robot_) out_ += "global " + names_.turn + " : [0..1] init " +
                            (robot_->turn_order == TurnOrder::HumanFirst ? "0" : "1") + ";\n";
        if (ft_) out_ += "global " + names_.ft + " : [0..3] init 0;\n";
        if (robot_ || ft_) out_ += "\n";
        if (opts_.use_named_formulas) {
            for_positions([&](const HumanPosition& p) {
                out_ += "formula " + names_.position(p) + " = " + position_predicate(p) + ";\n";
            });
            out_ += "\n";
        }
    }

    template <typename Fn>
    void for_positions(Fn&& fn) const {
        for (int x = 0; x < env_.grid.width; ++x)
            for (int y = 0; y < env_.grid.height; ++y)
                for (int o = 0; o < 8; ++o) fn(HumanPosition{{x, y}, Orientation(o)});
    }

    std::string position_predicate(const HumanPosition& p) const {
        return names_.x + "=" + std::to_string(p.loc.x) + " & " + names_.y + "=" + std::to_string(p.loc.y) + " & " +
               names_.o + "=" + std::to_string(p.orient.index());
    }
    std::string position_guard(const HumanPosition& p) const {
        return opts_.use_named_formulas ? names_.position(p) : position_predicate(p);
    }

    bool before(const HumanPosition& p, Location a, Location b) const {
        if (cfg_.variant == HumanVariant::UniqueClosest) return closer_in_total_order(p, a, b);
        return squared_distance(p.loc, a) < squared_distance(p.loc, b);
    }

    MovementVector lookup(Objective o, const HumanPosition& p, Location loc, bool& confident) const {
        MovementVector v{};
        const double bearing = signed_angle(p, loc);
        const double dist = distance(p.loc, loc);
        confident = true;
        for (auto m : kMovements) {
            const QCell c = q_.lookup_bearing(o, m, bearing, dist);
            v[index_of(m)] = c.value;
            confident = confident && c.confident;
        }
        return v;
    }

    std::vector<Candidate> candidates(const HumanPosition& p, Objective o, std::optional<Location> robot) const {
        std::vector<int> feats;
        for (std::size_t i = 0; i < env_.features.size(); ++i)
            if (env_.features[i].type == feature_type_of(o) && env_.features[i].loc != p.loc)
                feats.push_back(static_cast<int>(i));
        const bool with_robot = o == Objective::Avoid && robot && *robot != p.loc;
        std::vector<Candidate> out;
        auto loc_of = [&](int f) { return env_.features[static_cast<std::size_t>(f)].loc; };
        for (int f : feats) {
            if (with_robot && before(p, *robot, loc_of(f))) continue;
            Candidate c;
            c.slot = f;
            for (int g : feats)
                if (g != f && before(p, loc_of(g), loc_of(f))) c.lits.push_back(2 * g);
            c.lits.push_back(2 * f + 1);
            std::sort(c.lits.begin(), c.lits.end());
            c.values = lookup(o, p, loc_of(f), c.confident);
            out.push_back(std::move(c));
        }
        if (with_robot) {
            Candidate c;
            c.slot = kRobotFeature;
            // A feature sharing the robot's cell wins the tie in the total order.
            const bool unique = cfg_.variant == HumanVariant::UniqueClosest;
            for (int g : feats)
                if (before(p, loc_of(g), *robot) || (unique && loc_of(g) == *robot)) c.lits.push_back(2 * g);
            c.values = lookup(o, p, *robot, c.confident);
            out.push_back(std::move(c));
        } else {
            Candidate c;
            for (int g : feats) c.lits.push_back(2 * g);
            out.push_back(std::move(c));
        }
        return out;
    }

    std::string slot_name(int slot) const {
        if (slot == kNoFeature) return "-";
        if (slot == kRobotFeature) return "robot";
        return "f" + std::to_string(env_.features[static_cast<std::size_t>(slot)].id);
    }

    std::vector<Group> groups(const HumanPosition& p, Objective o, std::optional<Location> robot) const {
        const auto cands = candidates(p, o, robot);
        const bool lowconf = cfg_.variant == HumanVariant::LowConfidence;
        std::vector<std::vector<const Candidate*>> members;
        for (const auto& c : cands) {
            bool placed = false;
            if (opts_.collapse_far_bins)
                for (auto& m : members)
                    if (m.front()->values == c.values && (!lowconf || m.front()->confident == c.confident)) {
                        m.push_back(&c);
                        placed = true;
                        break;
                    }
            if (!placed) members.push_back({&c});
        }
        const bool has_type = env_.count(feature_type_of(o)) > 0;
        std::vector<Group> out;
        for (const auto& m : members) {
            Group g;
            g.values = m.front()->values;
            g.confident = m.front()->confident;
            std::vector<std::string> labels;
            for (const auto* c : m) labels.push_back(slot_name(c->slot));
            g.label = join(labels, "|");
            g.exhausted = has_type && m.size() == 1 && m.front()->slot == kNoFeature;
            // Factor the literals shared by every member out of the disjunction.
            Conj common = m.front()->lits;
            for (const auto* c : m) {
                Conj next;
                std::set_intersection(common.begin(), common.end(), c->lits.begin(), c->lits.end(),
                                      std::back_inserter(next));
                common = std::move(next);
            }
            std::vector<std::string> rest;
            bool any_empty = false;
            for (const auto* c : m) {
                Conj r;
                std::set_difference(c->lits.begin(), c->lits.end(), common.begin(), common.end(),
                                    std::back_inserter(r));
                if (r.empty()) any_empty = true;
                rest.push_back(r.size() > 1 && m.size() > 1 ? "(" + conj_text(r) + ")" : conj_text(r));
            }
            std::vector<std::string> parts;
            if (!common.empty()) parts.push_back(conj_text(common));
            if (!any_empty && m.size() > 1) parts.push_back("(" + join(rest, " | ") + ")");
            else if (!any_empty) parts.push_back(rest.front());
            g.guard = join(parts, " & ");
            out.push_back(std::move(g));
        }
        return out;
    }

    std::string turn_to_robot() const { return robot_ ? " & (" + names_.turn + "'=1)" : ""; }

    std::string stuck_update() const {
        std::string u = "(" + names_.dead + "'=true) & (" + names_.x + "'=0) & (" + names_.y + "'=0) & (" + names_.o +
                        "'=0)";
        for (const auto& b : names_.b) u += " & (" + b + "'=false)";
        return u + turn_to_robot();
    }

    std::string move_update(const HumanPosition& p, Movement m) const {
        if (!is_valid(p, m, env_)) return stuck_update();
        const HumanPosition n = post_position(p, m);
        std::string u = "(" + names_.x + "'=" + std::to_string(n.loc.x) + ") & (" + names_.y + "'=" +
                        std::to_string(n.loc.y) + ") & (" + names_.o + "'=" + std::to_string(n.orient.index()) + ")";
        const int f = feature_at(env_, n.loc);
        if (f >= 0) {
            const auto& b = names_.b[static_cast<std::size_t>(f)];
            u += " & (" + b + "'=false)";
            if (ft_) {
                const auto k = index_of(objective_of(env_.features[static_cast<std::size_t>(f)].type)) + 1;
                u += " & (" + names_.ft + "'=(" + b + " ? " + std::to_string(k) + " : 0))";
            }
        }
        return u + turn_to_robot();
    }

    /// Prefix shared by every human command: turn, flag and stuck guards.
    std::string human_prefix() const {
        std::vector<std::string> parts;
        if (robot_) parts.push_back(names_.turn + "=0");
        if (ft_) parts.push_back(names_.ft + "=0");
        if (fall_) parts.push_back("!" + names_.dead);
        return join(parts, " & ");
    }

    void command(const std::string& guard, const std::string& updates, const std::string& note) {
        std::string label;
        if (named_) label = "c" + std::to_string(next_command_);
        ++next_command_;
        out_ += "  [" + label + "] " + guard + " -> " + updates + ";";
        if (!note.empty()) out_ += " // " + note;
        out_ += "\n";
    }

    void emit_distribution(const std::string& guard, const HumanPosition& p, const MovementVector& values,
                           const std::string& note) {
        const MovementVector prob = softmax(values, tau_);
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < 3; ++i)
            if (prob[i] > 0.0) idx.push_back(i);
        std::vector<std::string> printed;
        double sum = 0.0;
        std::vector<std::pair<Movement, std::string>> consumed;
        std::string updates;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            std::string pv;
            if (j + 1 < idx.size()) {
                pv = num(prob[idx[j]]);
                sum += std::strtod(pv.c_str(), nullptr);
            } else {
                pv = num(1.0 - sum);
            }
            const Movement m = kMovements[idx[j]];
            if (j) updates += " + ";
            updates += pv + ":" + move_update(p, m);
            consumed.emplace_back(m, pv);
        }
        const std::string label = named_ ? "c" + std::to_string(next_command_) : "";
        command(guard, updates, note);
        if (!named_) return;
        for (const auto& [m, pv] : consumed) {
            if (!is_valid(p, m, env_)) continue;
            const int f = feature_at(env_, post_position(p, m).loc);
            if (f < 0) continue;
            const auto k = index_of(objective_of(env_.features[static_cast<std::size_t>(f)].type));
            reward_items_[k] += "  [" + label + "] " + names_.b[static_cast<std::size_t>(f)] + " : " + pv + ";\n";
        }
    }

    void position_block(const HumanPosition& p, std::optional<Location> robot) {
        out_ += "  // position " + std::to_string(p.loc.x) + " " + std::to_string(p.loc.y) + " " +
                std::to_string(p.orient.index());
        std::vector<std::string> prefix_parts;
        const std::string hp = human_prefix();
        if (!hp.empty()) prefix_parts.push_back(hp);
        prefix_parts.push_back(position_guard(p));
        if (robot) {
            out_ += " robot " + std::to_string(robot->x) + " " + std::to_string(robot->y);
            prefix_parts.push_back(names_.rx + "=" + std::to_string(robot->x) + " & " + names_.ry + "=" +
                                   std::to_string(robot->y));
        }
        out_ += "\n";
        const std::string prefix = join(prefix_parts, " & ");

        std::array<bool, 3> valid{};
        bool any_valid = false;
        for (auto m : kMovements) any_valid |= valid[index_of(m)] = is_valid(p, m, env_);
        if (!any_valid && !fall_) {
            command(prefix, robot_ ? "(" + names_.turn + "'=1)" : "true", "stuck");
            return;
        }

        std::array<std::vector<Group>, 3> per;
        for (auto o : kObjectives) per[index_of(o)] = groups(p, o, robot);
        struct Cmd {
            std::string guard;  // objective part
            MovementVector values;
            bool confident;
            std::string note;
        };
        std::vector<Cmd> cmds;
        const auto& w = spec_.weights.w;
        for (const auto& a : per[0])
            for (const auto& c : per[1])
                for (const auto& f : per[2]) {
                    Cmd k;
                    std::vector<std::string> parts;
                    for (const Group* g : {&a, &c, &f})
                        if (!g->guard.empty()) parts.push_back(g->guard);
                    k.guard = join(parts, " & ");
                    k.confident = a.confident && c.confident && f.confident;
                    for (std::size_t i = 0; i < 3; ++i)
                        k.values[i] = (!fall_ && !valid[i]) ? kNegInf
                                                            : w[0] * a.values[i] + w[1] * c.values[i] + w[2] * f.values[i];
                    const bool exhausted = a.exhausted || c.exhausted || f.exhausted;
                    k.note = (exhausted ? "x " : "t ") + a.label + "," + c.label + "," + f.label;
                    cmds.push_back(std::move(k));
                }

        std::string shaky;  // disjunction of low-confidence command guards
        if (cfg_.variant == HumanVariant::LowConfidence) {
            std::vector<std::string> alts;
            bool always = false;
            for (const auto& k : cmds)
                if (!k.confident) {
                    if (k.guard.empty()) always = true;
                    alts.push_back("(" + k.guard + ")");
                }
            if (always) shaky = "true";
            else if (!alts.empty()) shaky = join(alts, " | ");
        }
        for (const auto& k : cmds) {
            if (shaky == "true") break;
            if (!k.confident && !shaky.empty()) continue;
            std::string g = prefix;
            if (!k.guard.empty()) g += " & " + k.guard;
            if (!shaky.empty()) g += " & !(" + shaky + ")";
            emit_distribution(g, p, k.values, k.note);
        }
        if (!shaky.empty()) {
            const std::string g = shaky == "true" ? prefix : prefix + " & (" + shaky + ")";
            for (auto m : kMovements) {
                if (!fall_ && !valid[index_of(m)]) continue;
                command(g, "1:" + move_update(p, m), "move " + std::string(to_string(m)));
            }
        }
    }

    void human_module() {
        const HumanPosition& s = spec_.init_h;
        out_ += "module human\n";
        out_ += "  " + names_.x + " : [0.." + std::to_string(env_.grid.width - 1) + "] init " +
                std::to_string(s.loc.x) + ";\n";
        out_ += "  " + names_.y + " : [0.." + std::to_string(env_.grid.height - 1) + "] init " +
                std::to_string(s.loc.y) + ";\n";
        out_ += "  " + names_.o + " : [0..7] init " + std::to_string(s.orient.index()) + ";\n";
        if (fall_) out_ += "  " + names_.dead + " : bool init false;\n";
        for (const auto& b : names_.b) out_ += "  " + b + " : bool init true;\n";
        out_ += "\n";
        for_positions([&](const HumanPosition& p) {
            if (obstacle_mode_) {
                for (int rx = 0; rx < env_.grid.width; ++rx)
                    for (int ry = 0; ry < env_.grid.height; ++ry) position_block(p, Location{rx, ry});
            } else {
                position_block(p, std::nullopt);
            }
        });
        if (fall_) {
            std::vector<std::string> g;
            if (robot_) g.push_back(names_.turn + "=0");
            if (ft_) g.push_back(names_.ft + "=0");
            g.push_back(names_.dead);
            command(join(g, " & "), robot_ ? "(" + names_.turn + "'=1)" : "true", "stuck");
        }
        if (ft_) command(names_.ft + ">0", "(" + names_.ft + "'=0)", "settle");
        out_ += "endmodule\n";
    }

    void robot_module() {
        const RobotSpec& r = *robot_;
        const int W = env_.grid.width, H = env_.grid.height;
        const std::string& rx = names_.rx;
        const std::string& ry = names_.ry;
        const std::string& ro = names_.ro;
        out_ += "\nmodule robot\n";
        out_ += "  " + rx + " : [0.." + std::to_string(W - 1) + "] init " + std::to_string(r.start.loc.x) + ";\n";
        out_ += "  " + ry + " : [0.." + std::to_string(H - 1) + "] init " + std::to_string(r.start.loc.y) + ";\n";
        out_ += "  " + ro + " : [0..3] init " + std::to_string(r.start.orient.index() / 2) + ";\n\n";
        std::string g = names_.turn + "=1";
        if (ft_) g += " & " + names_.ft + "=0";
        const std::string back = " & (" + names_.turn + "'=0)";
        command(g, "(" + ro + "'=mod(" + ro + "+1,4))" + back, "TURN_LEFT");
        command(g, "(" + ro + "'=mod(" + ro + "+3,4))" + back, "TURN_RIGHT");
        const std::string fwd = "((" + ro + "=0 & " + rx + "<" + std::to_string(W - 1) + ") | (" + ro + "=1 & " + ry +
                                "<" + std::to_string(H - 1) + ") | (" + ro + "=2 & " + rx + ">0) | (" + ro + "=3 & " +
                                ry + ">0))";
        command(g + " & " + fwd,
                "(" + rx + "'=" + rx + " + (" + ro + "=0 ? 1 : (" + ro + "=2 ? -1 : 0))) & (" + ry + "'=" + ry + " + (" +
                    ro + "=1 ? 1 : (" + ro + "=3 ? -1 : 0)))" + back,
                "FORWARD");
        out_ += "endmodule\n";
    }

    void rewards() {
        if (!opts_.include_rewards) return;
        for (auto o : kObjectives) {
            out_ += "\nrewards \"" + std::string(to_string(o)) + "\"\n";
            if (ft_) out_ += "  " + names_.ft + "=" + std::to_string(index_of(o) + 1) + " : 1;\n";
            else out_ += reward_items_[index_of(o)];
            out_ += "endrewards\n";
        }
    }

    std::string settled() const {
        std::string s;
        if (ft_) s += " & " + names_.ft + "=0";
        return s;
    }

    void labels() {
        std::vector<std::string> goal;
        for (const auto& c : env_.goal.cells())
            goal.push_back("(" + names_.x + "=" + std::to_string(c.x) + " & " + names_.y + "=" + std::to_string(c.y) + ")");
        std::string g = goal.empty() ? "false" : "(" + join(goal, " | ") + ")";
        if (fall_ && !goal.empty()) g += " & !" + names_.dead;
        if (!goal.empty()) g += settled();
        out_ += "\nlabel \"goal\" = " + g + ";\n";

        std::vector<std::string> stuck;
        if (fall_) stuck.push_back(names_.dead);
        for_positions([&](const HumanPosition& p) {
            for (auto m : kMovements)
                if (is_valid(p, m, env_)) return;
            stuck.push_back("(" + position_predicate(p) + (fall_ ? " & !" + names_.dead : "") + settled() + ")");
        });
        out_ += "label \"stuck\" = " + (stuck.empty() ? std::string("false") : join(stuck, " | ")) + ";\n";
        if (robot_) {
            std::vector<std::string> rg;
            for (const auto& c : robot_->goal.cells())
                rg.push_back("(" + names_.rx + "=" + std::to_string(c.x) + " & " + names_.ry + "=" +
                             std::to_string(c.y) + ")");
            std::string r = rg.empty() ? "false" : "(" + join(rg, " | ") + ")" + settled();
            out_ += "label \"robot_goal\" = " + r + ";\n";
        }
    }
};

}  // namespace

PrismExport export_human(const ScenarioSpec& spec, const QTableSet& q, const HumanModelConfig& cfg,
                         const EncodingOptions& opts) {
    PrismExport e;
    e.text = Emitter(spec, q, cfg, opts, nullptr).run();
    e.stats = encoding_stats(e.text);
    return e;
}

PrismExport export_sg(const ScenarioSpec& spec, const QTableSet& q, const RobotSpec& robot,
                      const HumanModelConfig& cfg, const EncodingOptions& opts) {
    PrismExport e;
    e.text = Emitter(spec, q, cfg, opts, &robot).run();
    e.stats = encoding_stats(e.text);
    return e;
}

EncodingStats encoding_stats(std::string_view text) {
    if (text.substr(0, kMagic.size()) != kMagic) throw InputError("not a cogverify export (missing header)", 1, 1);
    EncodingStats st;
    st.bytes = text.size();
    std::size_t robot_obstacle = 0;
    bool have_counts = false;
    std::size_t in_block = 0;
    bool block_open = false;
    auto close_block = [&] {
        if (!block_open) return;
        st.max_triple_commands = std::max(st.max_triple_commands, in_block);
        if (in_block > st.bound) ++st.positions_over_bound;
        in_block = 0;
        block_open = false;
    };
    std::istringstream in{std::string(text)};
    std::string line;
    bool in_module = false;
    while (std::getline(in, line)) {
        ++st.lines;
        const auto first = line.find_first_not_of(' ');
        if (first == std::string::npos) continue;
        const std::string_view l = std::string_view(line).substr(first);
        if (l.rfind("// features ", 0) == 0) {
            unsigned long counts[4] = {0, 0, 0, 0};
            if (std::sscanf(line.c_str() + first, "// features obstacle=%lu litter=%lu waypoint=%lu robot_obstacle=%lu",
                            &counts[0], &counts[1], &counts[2], &counts[3]) != 4)
                throw InputError("malformed features line", static_cast<int>(st.lines), 1);
            for (int i = 0; i < 3; ++i) st.feature_counts[static_cast<std::size_t>(i)] = counts[i];
            robot_obstacle = counts[3];
            st.bound = std::max<std::size_t>(1, counts[0] + robot_obstacle) * std::max<std::size_t>(1, counts[1]) *
                       std::max<std::size_t>(1, counts[2]);
            have_counts = true;
            continue;
        }
        if (l.rfind("// position ", 0) == 0) {
            close_block();
            block_open = true;
            ++st.positions;
            continue;
        }
        if (l.rfind("//", 0) == 0) continue;
        if (l.rfind("module ", 0) == 0) {
            in_module = true;
            continue;
        }
        if (l.rfind("endmodule", 0) == 0) {
            close_block();
            in_module = false;
            continue;
        }
        if (l.rfind("global ", 0) == 0) ++st.variables;
        if (!in_module) continue;
        if (l.front() == '[') {
            ++st.commands;
            const auto note = l.find("; // ");
            const std::string_view tag = note == std::string_view::npos ? "" : l.substr(note + 5);
            if (tag.rfind("t ", 0) == 0) {
                ++st.triple_commands;
                ++in_block;
            } else if (tag.rfind("x ", 0) == 0) {
                ++st.exhausted_commands;
            } else {
                ++st.other_commands;
            }
        } else if (l.find(" : ") != std::string_view::npos && l.find(" init ") != std::string_view::npos) {
            ++st.variables;
        }
    }
    close_block();
    if (!have_counts) throw InputError("not a cogverify export (missing features line)");
    return st;
}

}  // namespace cogverify
