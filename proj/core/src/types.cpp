#include "cogverify/types.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

namespace cogverify {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& i : issues) {
        if (!out.empty()) out += "; ";
        out += i;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string with_position(const std::string& msg, int line, int column) {
    if (line <= 0) return msg;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
}

}  // namespace

InputError::InputError(const std::string& msg, int line, int column)
    : std::runtime_error(with_position(msg, line, column)), line_(line), column_(column) {}

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

double Orientation::radians() const { return index_ * std::numbers::pi / 4.0; }

GoalRegion::GoalRegion(std::vector<Location> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

GoalRegion GoalRegion::rectangle(Location lo, Location hi) {
    std::vector<Location> cells;
    for (int x = std::min(lo.x, hi.x); x <= std::max(lo.x, hi.x); ++x)
        for (int y = std::min(lo.y, hi.y); y <= std::max(lo.y, hi.y); ++y) cells.push_back({x, y});
    return GoalRegion(std::move(cells));
}

bool GoalRegion::contains(Location l) const {
    return std::binary_search(cells_.begin(), cells_.end(), l);
}

std::size_t Environment::count(FeatureType t) const {
    return static_cast<std::size_t>(std::count_if(
        features.begin(), features.end(), [t](const Feature& f) { return f.type == t; }));
}

int Environment::index_of_id(int id) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].id == id) return static_cast<int>(i);
    return -1;
}

std::string_view to_string(Movement m) {
    switch (m) {
    case Movement::Left: return "LEFT";
    case Movement::Straight: return "STRAIGHT";
    case Movement::Right: return "RIGHT";
    }
    return "?";
}

std::string_view to_string(FeatureType t) {
    switch (t) {
    case FeatureType::Obstacle: return "obstacle";
    case FeatureType::Litter: return "litter";
    case FeatureType::Waypoint: return "waypoint";
    }
    return "?";
}

std::string_view to_string(Objective o) {
    switch (o) {
    case Objective::Avoid: return "avoid";
    case Objective::Collect: return "collect";
    case Objective::Follow: return "follow";
    }
    return "?";
}

std::optional<Movement> parse_movement(std::string_view s) {
    const auto l = lower(s);
    if (l == "left") return Movement::Left;
    if (l == "straight") return Movement::Straight;
    if (l == "right") return Movement::Right;
    return std::nullopt;
}

std::optional<FeatureType> parse_feature_type(std::string_view s) {
    const auto l = lower(s);
    if (l == "obstacle" || l == "obst") return FeatureType::Obstacle;
    if (l == "litter" || l == "litt") return FeatureType::Litter;
    if (l == "waypoint" || l == "wpt") return FeatureType::Waypoint;
    return std::nullopt;
}

std::optional<Objective> parse_objective(std::string_view s) {
    const auto l = lower(s);
    if (l == "avoid") return Objective::Avoid;
    if (l == "collect") return Objective::Collect;
    if (l == "follow") return Objective::Follow;
    return std::nullopt;
}

std::string to_string(Location l) {
    return "(" + std::to_string(l.x) + "," + std::to_string(l.y) + ")";
}

std::string to_string(const HumanPosition& p) {
    return "(" + to_string(p.loc) + "," + std::to_string(p.orient.index()) + ")";
}

}  // namespace cogverify
