#pragma once

#include <bit>
#include <cstdint>
#include <utility>

#include "cogverify/types.hpp"

namespace cogverify {

/// Set of feature indices (positions in Environment::features).
class FeatureSet {
public:
    static constexpr int kCapacity = 48;

    constexpr FeatureSet() = default;
    constexpr explicit FeatureSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr FeatureSet all(std::size_t n) {
        return FeatureSet(n == 0 ? 0 : (~std::uint64_t{0} >> (64 - n)));
    }

    constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
    constexpr FeatureSet without(int i) const { return FeatureSet(bits_ & ~(std::uint64_t{1} << i)); }
    constexpr FeatureSet with(int i) const { return FeatureSet(bits_ | (std::uint64_t{1} << i)); }
    constexpr bool subset_of(FeatureSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint64_t bits() const { return bits_; }

    constexpr auto operator<=>(const FeatureSet&) const = default;

private:
    std::uint64_t bits_ = 0;
};

struct Situation {
    HumanPosition pos;
    FeatureSet present;
    auto operator<=>(const Situation&) const = default;
};

std::pair<int, int> direction_vector(Orientation o);

/// Rotate by the movement's heading change, then step along the new heading.
/// The result may lie off the grid.
HumanPosition post_position(const HumanPosition& p, Movement m);

bool is_valid(const HumanPosition& p, Movement m, const Grid& grid);
inline bool is_valid(const HumanPosition& p, Movement m, const Environment& env) {
    return is_valid(p, m, env.grid);
}

/// Throws ModelError if m is invalid at s.pos.
Situation effect(const Situation& s, Movement m, const Environment& env);

/// Index of the feature at `loc`, or -1. Environments hold at most one feature per cell.
int feature_at(const Environment& env, Location loc);

long squared_distance(Location a, Location b);
double distance(Location a, Location b);
inline double distance(const HumanPosition& p, const Feature& f) { return distance(p.loc, f.loc); }

/// Bearing of `target` relative to the heading, in (-pi, pi]. Positive means
/// the target lies to the human's left (counterclockwise). Throws ModelError
/// when target coincides with the human's location.
double signed_angle(const HumanPosition& p, Location target);
inline double signed_angle(const HumanPosition& p, const Feature& f) {
    return signed_angle(p, f.loc);
}

}  // namespace cogverify
