#include "cogverify/model_io.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace cogverify {

namespace {

std::string fmt_prob(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

int parse_slot(const std::string& s) {
    if (s == "-") return -1;
    if (s == "R") return -2;
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
}

}  // namespace

ParsedLabel parse_label_text(const std::string& text) {
    if (text == "stuck") return {ActionLabel::stuck(), {}};
    if (auto m = parse_movement(text)) return {ActionLabel::movement(*m), {}};
    for (auto r : {RobotAction::TurnLeft, RobotAction::TurnRight, RobotAction::Forward})
        if (text == to_string(r)) return {ActionLabel::robot(r), {}};
    if (text.size() >= 7 && text.front() == '(' && text.back() == ')') {
        std::vector<std::string> parts;
        std::stringstream ss(text.substr(1, text.size() - 2));
        std::string part;
        while (std::getline(ss, part, ',')) parts.push_back(part);
        if (parts.size() == 3) {
            try {
                return {ActionLabel::triple(parse_slot(parts[0]), parse_slot(parts[1]),
                                            parse_slot(parts[2])),
                        {}};
            } catch (const std::exception&) {
            }
        }
    }
    return {{ActionKind::Named, 0, 0, 0}, text};
}

std::string write_explicit(const StochasticGame& g,
                           const std::vector<std::optional<HumanPosition>>& locations) {
    std::ostringstream out;
    out << "cogverify-explicit 1\n";
    out << "states " << g.num_states() << "\n";
    out << "initial " << g.initial() << "\n";
    for (StateIndex s = 0; s < g.num_states(); ++s)
        if (g.player(s) == Player::Box) out << "player " << s << " box\n";
    for (StateIndex s = 0; s < g.num_states(); ++s)
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            const auto local = a - g.action_begin(s);
            out << "action " << s << " " << local << " " << g.label_text(g.label(a)) << "\n";
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                out << s << " " << local << " " << fmt_prob(g.probability(b)) << " " << g.target(b)
                    << "\n";
        }
    for (const auto& [name, mask] : g.atoms()) {
        out << "label " << name;
        for (StateIndex s = 0; s < mask.size(); ++s)
            if (mask[s]) out << " " << s;
        out << "\n";
    }
    for (StateIndex s = 0; s < locations.size(); ++s)
        if (locations[s])
            out << "location " << s << " " << locations[s]->loc.x << " " << locations[s]->loc.y
                << " " << locations[s]->orient.index() << "\n";
    return out.str();
}

ExplicitModel read_explicit(const std::string& text) {
    struct Action {
        std::string label = {};
        std::vector<std::pair<StateIndex, double>> branches = {};
    };
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header = false;
    long n = -1;
    long initial = 0;
    std::map<StateIndex, std::map<long, Action>> actions;
    std::map<StateIndex, Player> players;
    std::map<std::string, std::vector<StateIndex>> labels;
    std::map<StateIndex, HumanPosition> locs;

    auto fail = [&](const std::string& msg) { return InputError(msg, lineno, 1); };
    auto state_ref = [&](long s) {
        if (n < 0) throw fail("'states' must come before state references");
        if (s < 0 || s >= n) throw fail("state " + std::to_string(s) + " out of range");
        return static_cast<StateIndex>(s);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head[0] == '#') continue;
        if (!header) {
            int version = 0;
            if (head != "cogverify-explicit" || !(ls >> version) || version != 1)
                throw fail("missing 'cogverify-explicit 1' header");
            header = true;
            continue;
        }
        if (head == "states") {
            if (!(ls >> n) || n <= 0) throw fail("malformed state count");
        } else if (head == "initial") {
            if (!(ls >> initial)) throw fail("malformed initial state");
            state_ref(initial);
        } else if (head == "player") {
            long s;
            std::string p;
            if (!(ls >> s >> p) || (p != "box" && p != "circle")) throw fail("malformed player line");
            players[state_ref(s)] = p == "box" ? Player::Box : Player::Circle;
        } else if (head == "action") {
            long s, a;
            std::string lbl;
            if (!(ls >> s >> a >> lbl) || a < 0) throw fail("malformed action line");
            actions[state_ref(s)][a].label = lbl;
        } else if (head == "label") {
            std::string name;
            if (!(ls >> name)) throw fail("malformed label line");
            auto& v = labels[name];
            long s;
            while (ls >> s) v.push_back(state_ref(s));
            if (!ls.eof()) throw fail("malformed label line");
        } else if (head == "location") {
            long s;
            int x, y, o;
            if (!(ls >> s >> x >> y >> o) || o < 0 || o > 7) throw fail("malformed location line");
            locs[state_ref(s)] = {{x, y}, Orientation(o)};
        } else {
            long s, a, t;
            double p;
            ls.clear();
            ls.seekg(0);
            if (!(ls >> s >> a >> p >> t) || a < 0) throw fail("malformed transition line");
            if (!(p >= 0.0 && p <= 1.0)) throw fail("probability outside [0,1]");
            actions[state_ref(s)][a].branches.emplace_back(state_ref(t), p);
        }
        std::string extra;
        if (head != "label" && (ls >> extra)) throw fail("trailing text after '" + head + "'");
    }
    if (!header) throw InputError("empty model file", 1, 1);
    if (n < 0) throw InputError("missing 'states' line");

    GameBuilder b(static_cast<std::size_t>(n));
    for (StateIndex s = 0; s < static_cast<StateIndex>(n); ++s) {
        const auto pit = players.find(s);
        b.add_state(pit == players.end() ? Player::Circle : pit->second);
        const auto ait = actions.find(s);
        if (ait == actions.end()) continue;
        long expect = 0;
        for (const auto& [local, act] : ait->second) {
            if (local != expect++)
                throw InputError("state " + std::to_string(s) + " skips action index " +
                                 std::to_string(expect - 1));
            const auto parsed = parse_label_text(act.label.empty() ? "a" + std::to_string(local) : act.label);
            if (parsed.label.kind == ActionKind::Named) b.add_named_action(parsed.name);
            else b.add_action(parsed.label);
            for (const auto& [t, p] : act.branches) b.add_branch(t, p);
        }
    }
    b.set_initial(static_cast<StateIndex>(initial));
    ExplicitModel out;
    out.game = b.finish();
    for (const auto& [name, states] : labels) {
        std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
        for (auto s : states) mask[s] = 1;
        out.game.set_atom(name, std::move(mask));
    }
    if (!locs.empty()) {
        out.locations.resize(static_cast<std::size_t>(n));
        for (const auto& [s, p] : locs) out.locations[s] = p;
    }
    try {
        validate_model(out.game);
    } catch (const ModelError& e) {
        throw InputError(e.what());
    }
    return out;
}

}  // namespace cogverify
