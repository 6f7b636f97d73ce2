#include "cogverify/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "yaml_util.hpp"

namespace cogverify {

using detail::require;
using detail::require_sequence;
using detail::yaml_as;
using detail::yaml_error;

std::string_view to_string(RobotMode m) {
    return m == RobotMode::Ignored ? "ignored" : "obstacle";
}

std::string_view to_string(TurnOrder t) {
    return t == TurnOrder::HumanFirst ? "human_first" : "robot_first";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> environment_issues(const Environment& env) {
    std::vector<std::string> issues;
    const Grid& g = env.grid;
    if (g.width < 1 || g.height < 1 || g.width > kMaxGridSide || g.height > kMaxGridSide)
        issues.push_back("grid dimensions must lie in [1," + std::to_string(kMaxGridSide) + "]");
    if (env.features.size() > static_cast<std::size_t>(FeatureSet::kCapacity))
        issues.push_back("at most " + std::to_string(FeatureSet::kCapacity) +
                         " features are supported");

    std::set<int> ids;
    std::set<Location> cells;
    for (const auto& f : env.features) {
        const std::string name = std::string(to_string(f.type)) + " " + std::to_string(f.id) +
                                 " at " + to_string(f.loc);
        if (!g.contains(f.loc)) issues.push_back("feature off-grid: " + name);
        if (!ids.insert(f.id).second) issues.push_back("duplicate feature id: " + name);
        if (!cells.insert(f.loc).second) issues.push_back("duplicate feature location: " + name);
    }
    for (const auto& c : env.goal.cells())
        if (!g.contains(c)) issues.push_back("goal cell off-grid: " + to_string(c));
    return issues;
}

void validate_environment(const Environment& env) {
    auto issues = environment_issues(env);
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<std::string> scenario_issues(const ScenarioSpec& spec) {
    auto issues = environment_issues(spec.env);
    const Grid& g = spec.env.grid;
    if (!g.contains(spec.init_h.loc)) issues.push_back("human start off-grid");
    if (feature_at(spec.env, spec.init_h.loc) >= 0)
        issues.push_back("human start coincides with a feature at " + to_string(spec.init_h.loc));
    if (!(spec.temperature > 0.0) || !std::isfinite(spec.temperature))
        issues.push_back("temperature must be positive and finite");
    double sum = 0.0;
    for (double w : spec.weights.w) {
        if (!(w >= 0.0) || !std::isfinite(w)) issues.push_back("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) issues.push_back("weight sum must equal 1");
    if (spec.robot) {
        const auto& r = *spec.robot;
        if (!g.contains(r.start.loc)) issues.push_back("robot start off-grid");
        if (!r.start.orient.is_cardinal())
            issues.push_back("robot orientation must be one of 0, 2, 4, 6");
        for (const auto& c : r.goal.cells())
            if (!g.contains(c)) issues.push_back("robot goal cell off-grid: " + to_string(c));
    }
    return issues;
}

void validate_scenario(const ScenarioSpec& spec) {
    auto issues = scenario_issues(spec);
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

namespace {

Location parse_location(const YAML::Node& n, const std::string& what) {
    require_sequence(n, what, 2);
    return {yaml_as<int>(n[0], what + " x"), yaml_as<int>(n[1], what + " y")};
}

HumanPosition parse_position(const YAML::Node& n, const std::string& what) {
    require_sequence(n, what, 3);
    const int o = yaml_as<int>(n[2], what + " orientation");
    if (o < 0 || o > 7) throw yaml_error(n[2], what + " orientation must lie in 0..7");
    return {{yaml_as<int>(n[0], what + " x"), yaml_as<int>(n[1], what + " y")}, Orientation(o)};
}

GoalRegion parse_goal(const YAML::Node& n, const std::string& what) {
    if (!n || n.IsNull()) return {};
    if (!n.IsMap()) throw yaml_error(n, what + " must be a map with 'rect', 'rects' or 'cells'");
    std::vector<Location> cells;
    auto add_rect = [&](const YAML::Node& r) {
        require_sequence(r, what + " rect", 4);
        const Location lo{yaml_as<int>(r[0], "rect x0"), yaml_as<int>(r[1], "rect y0")};
        const Location hi{yaml_as<int>(r[2], "rect x1"), yaml_as<int>(r[3], "rect y1")};
        const auto rect = GoalRegion::rectangle(lo, hi);
        cells.insert(cells.end(), rect.cells().begin(), rect.cells().end());
    };
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (key == "rect") {
            add_rect(kv.second);
        } else if (key == "rects") {
            require_sequence(kv.second, what + " rects");
            for (const auto& r : kv.second) add_rect(r);
        } else if (key == "cells") {
            require_sequence(kv.second, what + " cells");
            for (const auto& c : kv.second) cells.push_back(parse_location(c, what + " cell"));
        } else {
            throw yaml_error(kv.first, "unknown key '" + key + "' in " + what);
        }
    }
    return GoalRegion(std::move(cells));
}

ObjectiveWeights parse_weights(const YAML::Node& n) {
    ObjectiveWeights w;
    if (n.IsSequence()) {
        require_sequence(n, "weights", 3);
        for (std::size_t i = 0; i < 3; ++i) w.w[i] = yaml_as<double>(n[i], "weight");
        return w;
    }
    if (!n.IsMap()) throw yaml_error(n, "weights must be a list [avoid, collect, follow] or a map");
    w.w = {0, 0, 0};
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        const auto o = parse_objective(key);
        if (!o) throw yaml_error(kv.first, "unknown objective '" + key + "'");
        w.w[index_of(*o)] = yaml_as<double>(kv.second, "weight");
    }
    return w;
}

RobotMode parse_mode(const YAML::Node& n) {
    const auto s = yaml_as<std::string>(n, "robot mode");
    if (s == "ignored") return RobotMode::Ignored;
    if (s == "obstacle") return RobotMode::ObstacleFeature;
    throw yaml_error(n, "robot mode must be 'ignored' or 'obstacle'");
}

TurnOrder parse_turn_order(const YAML::Node& n) {
    const auto s = yaml_as<std::string>(n, "turn order");
    if (s == "human_first") return TurnOrder::HumanFirst;
    if (s == "robot_first") return TurnOrder::RobotFirst;
    throw yaml_error(n, "turn_order must be 'human_first' or 'robot_first'");
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
    const YAML::Node root = detail::yaml_parse(text);
    if (!root.IsMap()) throw InputError("scenario must be a YAML map", 1, 1);

    static const std::set<std::string> kKnown{"grid",  "features",    "goal",  "human",
                                              "weights", "temperature", "robot"};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!kKnown.count(key)) throw yaml_error(kv.first, "unknown section '" + key + "'");
    }

    ScenarioSpec spec;
    const auto grid = require(root, "grid");
    require_sequence(grid, "grid", 2);
    spec.env.grid = {yaml_as<int>(grid[0], "grid width"), yaml_as<int>(grid[1], "grid height")};

    if (const auto feats = root["features"]; feats && !feats.IsNull()) {
        require_sequence(feats, "features");
        int next_id = 1;
        for (const auto& f : feats) {
            if (!f.IsSequence() || (f.size() != 3 && f.size() != 4))
                throw yaml_error(f, "feature must be [type, x, y] or [type, x, y, id]");
            const auto tname = yaml_as<std::string>(f[0], "feature type");
            const auto type = parse_feature_type(tname);
            if (!type) throw yaml_error(f[0], "unknown feature type '" + tname + "'");
            Feature feat{*type, {yaml_as<int>(f[1], "feature x"), yaml_as<int>(f[2], "feature y")},
                         f.size() == 4 ? yaml_as<int>(f[3], "feature id") : next_id};
            next_id = feat.id + 1;
            spec.env.features.push_back(feat);
        }
    }

    spec.env.goal = parse_goal(root["goal"], "goal");
    spec.init_h = parse_position(require(root, "human"), "human");
    spec.weights = parse_weights(require(root, "weights"));
    spec.temperature = yaml_as<double>(require(root, "temperature"), "temperature");

    if (const auto r = root["robot"]; r && !r.IsNull()) {
        if (!r.IsMap()) throw yaml_error(r, "robot must be a map");
        RobotSpec robot;
        robot.start = parse_position(require(r, "start"), "robot start");
        robot.goal = parse_goal(r["goal"], "robot goal");
        if (r["mode"]) robot.mode = parse_mode(r["mode"]);
        if (r["turn_order"]) robot.turn_order = parse_turn_order(r["turn_order"]);
        spec.robot = robot;
    }

    validate_scenario(spec);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_text_file(path));
}

namespace {

void emit_cells(YAML::Emitter& out, const GoalRegion& g) {
    out << YAML::BeginMap << YAML::Key << "cells" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& c : g.cells()) out << YAML::Flow << YAML::BeginSeq << c.x << c.y << YAML::EndSeq;
    out << YAML::EndSeq << YAML::EndMap;
}

}  // namespace

std::string serialize_scenario(const ScenarioSpec& spec) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << spec.env.grid.width << spec.env.grid.height << YAML::EndSeq;
    out << YAML::Key << "features" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : spec.env.features)
        out << YAML::Flow << YAML::BeginSeq << std::string(to_string(f.type)) << f.loc.x << f.loc.y
            << f.id << YAML::EndSeq;
    out << YAML::EndSeq;
    out << YAML::Key << "goal" << YAML::Value;
    emit_cells(out, spec.env.goal);
    out << YAML::Key << "human" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << spec.init_h.loc.x << spec.init_h.loc.y << spec.init_h.orient.index() << YAML::EndSeq;
    out << YAML::Key << "weights" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << spec.weights.w[0] << spec.weights.w[1] << spec.weights.w[2] << YAML::EndSeq;
    out << YAML::Key << "temperature" << YAML::Value << spec.temperature;
    if (spec.robot) {
        const auto& r = *spec.robot;
        out << YAML::Key << "robot" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "start" << YAML::Value << YAML::Flow << YAML::BeginSeq
            << r.start.loc.x << r.start.loc.y << r.start.orient.index() << YAML::EndSeq;
        out << YAML::Key << "goal" << YAML::Value;
        emit_cells(out, r.goal);
        out << YAML::Key << "mode" << YAML::Value << std::string(to_string(r.mode));
        out << YAML::Key << "turn_order" << YAML::Value << std::string(to_string(r.turn_order));
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace cogverify
