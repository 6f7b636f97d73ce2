#include "cogverify/geometry.hpp"

#include <cmath>
#include <numbers>

namespace cogverify {

namespace {

constexpr std::array<std::pair<int, int>, 8> kDirections{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

}  // namespace

std::pair<int, int> direction_vector(Orientation o) {
    return kDirections[static_cast<std::size_t>(o.index())];
}

HumanPosition post_position(const HumanPosition& p, Movement m) {
    const Orientation next = p.orient.rotated(turn_steps(m));
    const auto [dx, dy] = direction_vector(next);
    return {{p.loc.x + dx, p.loc.y + dy}, next};
}

bool is_valid(const HumanPosition& p, Movement m, const Grid& grid) {
    return grid.contains(post_position(p, m).loc);
}

int feature_at(const Environment& env, Location loc) {
    for (std::size_t i = 0; i < env.features.size(); ++i)
        if (env.features[i].loc == loc) return static_cast<int>(i);
    return -1;
}

Situation effect(const Situation& s, Movement m, const Environment& env) {
    if (!is_valid(s.pos, m, env))
        throw ModelError("movement " + std::string(to_string(m)) + " is invalid at " +
                         to_string(s.pos));
    Situation next{post_position(s.pos, m), s.present};
    const int f = feature_at(env, next.pos.loc);
    if (f >= 0) next.present = next.present.without(f);
    return next;
}

long squared_distance(Location a, Location b) {
    const long dx = a.x - b.x;
    const long dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double distance(Location a, Location b) {
    return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

double signed_angle(const HumanPosition& p, Location target) {
    const int dx = target.x - p.loc.x;
    const int dy = target.y - p.loc.y;
    if (dx == 0 && dy == 0)
        throw ModelError("signed angle undefined for a feature at the human's location " +
                         to_string(p.loc));
    double rel = std::atan2(static_cast<double>(dy), static_cast<double>(dx)) - p.orient.radians();
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    while (rel <= -std::numbers::pi) rel += kTwoPi;
    while (rel > std::numbers::pi) rel -= kTwoPi;
    return rel;
}

}  // namespace cogverify
