#include "cogverify/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cogverify {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
    int slot;
    Location loc;
};

std::vector<Candidate> candidates(const Environment& env, const Scene& sc, Objective o) {
    std::vector<Candidate> out;
    for (int i : relevant_features(env, sc, o)) out.push_back({i, env.features[static_cast<std::size_t>(i)].loc});
    if (o == Objective::Avoid && sc.robot_obstacle && *sc.robot_obstacle != sc.s.pos.loc)
        out.push_back({kRobotFeature, *sc.robot_obstacle});
    return out;
}

}  // namespace

std::vector<int> relevant_features(const Environment& env, const Scene& sc, Objective o) {
    std::vector<int> out;
    const FeatureType t = feature_type_of(o);
    for (std::size_t i = 0; i < env.features.size(); ++i)
        if (env.features[i].type == t && sc.s.present.contains(static_cast<int>(i)))
            out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> closest_relevant(const Environment& env, const Scene& sc, Objective o) {
    const auto cands = candidates(env, sc, o);
    long best = std::numeric_limits<long>::max();
    for (const auto& c : cands) best = std::min(best, squared_distance(sc.s.pos.loc, c.loc));
    std::vector<int> out;
    for (const auto& c : cands)
        if (squared_distance(sc.s.pos.loc, c.loc) == best) out.push_back(c.slot);
    return out;
}

bool closer_in_total_order(const HumanPosition& p, Location a, Location b) {
    const long da = squared_distance(p.loc, a), db = squared_distance(p.loc, b);
    if (da != db) return da < db;
    const auto [hx, hy] = direction_vector(p.orient);
    auto dot = [&](Location l) { return long{hx} * (l.x - p.loc.x) + long{hy} * (l.y - p.loc.y); };
    auto cross = [&](Location l) { return long{hx} * (l.y - p.loc.y) - long{hy} * (l.x - p.loc.x); };
    // Equal distance: a larger dot product means a smaller absolute bearing.
    if (dot(a) != dot(b)) return dot(a) > dot(b);
    return cross(a) > 0 && cross(b) <= 0;
}

int unique_closest(const Environment& env, const Scene& sc, Objective o) {
    const auto cands = candidates(env, sc, o);
    if (cands.empty()) return kNoFeature;
    const Candidate* best = &cands.front();
    for (const auto& c : cands)
        if (closer_in_total_order(sc.s.pos, c.loc, best->loc)) best = &c;
    return best->slot;
}

Location slot_location(const Environment& env, const Scene& sc, int slot) {
    if (slot == kRobotFeature) return *sc.robot_obstacle;
    return env.features[static_cast<std::size_t>(slot)].loc;
}

std::vector<ObjectiveEntry> objective_movement_values(const Environment& env, const QTableSet& q,
                                                      const Scene& sc, Objective o, bool unique) {
    std::vector<int> slots;
    if (unique) {
        const int f = unique_closest(env, sc, o);
        if (f != kNoFeature) slots.push_back(f);
    } else {
        slots = closest_relevant(env, sc, o);
    }
    std::vector<ObjectiveEntry> out;
    out.reserve(slots.size());
    for (int f : slots) {
        const Location loc = slot_location(env, sc, f);
        const double bearing = signed_angle(sc.s.pos, loc);
        const double dist = distance(sc.s.pos.loc, loc);
        ObjectiveEntry e;
        e.feature = f;
        for (auto m : kMovements) {
            const QCell c = q.lookup_bearing(o, m, bearing, dist);
            e.values[index_of(m)] = c.value;
            e.confident = e.confident && c.confident;
        }
        out.push_back(e);
    }
    return out;
}

Valuation combine(const Environment& env, const QTableSet& q, const ObjectiveWeights& w,
                  const Scene& sc, DeadlockPolicy policy, bool unique) {
    std::array<std::vector<ObjectiveEntry>, 3> per;
    for (auto o : kObjectives) {
        per[index_of(o)] = objective_movement_values(env, q, sc, o, unique);
        if (per[index_of(o)].empty()) per[index_of(o)].push_back(ObjectiveEntry{});
    }
    std::array<bool, 3> valid{};
    for (auto m : kMovements) valid[index_of(m)] = is_valid(sc.s.pos, m, env);

    Valuation out;
    for (const auto& a : per[0])
        for (const auto& c : per[1])
            for (const auto& f : per[2]) {
                ValuationEntry e;
                e.triple = {a.feature, c.feature, f.feature};
                e.confident = a.confident && c.confident && f.confident;
                bool any = false;
                for (std::size_t i = 0; i < 3; ++i) {
                    if (policy == DeadlockPolicy::Block && !valid[i]) {
                        e.values[i] = kNegInf;
                        continue;
                    }
                    e.values[i] = w.w[0] * a.values[i] + w.w[1] * c.values[i] + w.w[2] * f.values[i];
                    any = true;
                }
                if (any) out.push_back(e);
            }
    return out;
}

MovementVector softmax(const MovementVector& v, double tau) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (mx == kNegInf) throw ModelError("softmax of an all -inf vector");
    MovementVector out{};
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] == kNegInf ? 0.0 : std::exp((v[i] - mx) / tau);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

bool all_confident(const Valuation& v) {
    return std::all_of(v.begin(), v.end(), [](const ValuationEntry& e) { return e.confident; });
}

}  // namespace cogverify
