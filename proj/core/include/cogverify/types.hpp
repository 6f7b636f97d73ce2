#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogverify {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& msg, int line = 0, int column = 0);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Well-formed input that violates one or more domain invariants.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Structural problem in a probabilistic model, or a solver precondition failure.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grid vocabulary
// ---------------------------------------------------------------------------

struct Location {
    int x = 0;
    int y = 0;
    auto operator<=>(const Location&) const = default;
};

/// One of the eight headings, index * pi/4 counterclockwise from +x.
class Orientation {
public:
    constexpr Orientation() = default;
    constexpr explicit Orientation(int index) : index_(((index % 8) + 8) % 8) {}

    constexpr int index() const { return index_; }
    double radians() const;
    constexpr Orientation rotated(int steps) const { return Orientation(index_ + steps); }
    constexpr bool is_cardinal() const { return index_ % 2 == 0; }

    auto operator<=>(const Orientation&) const = default;

private:
    int index_ = 0;
};

enum class Movement : std::uint8_t { Left = 0, Straight = 1, Right = 2 };

inline constexpr std::array<Movement, 3> kMovements{Movement::Left, Movement::Straight,
                                                    Movement::Right};

/// Heading change in eighth-turns: LEFT is counterclockwise.
constexpr int turn_steps(Movement m) {
    switch (m) {
    case Movement::Left: return 1;
    case Movement::Straight: return 0;
    case Movement::Right: return -1;
    }
    return 0;
}

struct HumanPosition {
    Location loc;
    Orientation orient;
    auto operator<=>(const HumanPosition&) const = default;
};

enum class FeatureType : std::uint8_t { Obstacle = 0, Litter = 1, Waypoint = 2 };

inline constexpr std::array<FeatureType, 3> kFeatureTypes{
    FeatureType::Obstacle, FeatureType::Litter, FeatureType::Waypoint};

struct Feature {
    FeatureType type = FeatureType::Obstacle;
    Location loc;
    int id = 0;
    auto operator<=>(const Feature&) const = default;
};

/// Locations are {0..width-1} x {0..height-1}, (0,0) bottom-left.
struct Grid {
    int width = 1;
    int height = 1;

    bool contains(Location l) const {
        return l.x >= 0 && l.y >= 0 && l.x < width && l.y < height;
    }
    int cell_count() const { return width * height; }
    auto operator<=>(const Grid&) const = default;
};

/// Sorted, duplicate-free set of cells.
class GoalRegion {
public:
    GoalRegion() = default;
    explicit GoalRegion(std::vector<Location> cells);

    static GoalRegion rectangle(Location lo, Location hi);

    bool contains(Location l) const;
    bool empty() const { return cells_.empty(); }
    const std::vector<Location>& cells() const { return cells_; }

    bool operator==(const GoalRegion&) const = default;

private:
    std::vector<Location> cells_;
};

struct Environment {
    Grid grid;
    std::vector<Feature> features;
    GoalRegion goal;

    std::size_t count(FeatureType t) const;
    /// Index into `features` of the feature with this id, or -1.
    int index_of_id(int id) const;
    bool operator==(const Environment&) const = default;
};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// Order matches the weight vector [w_AVOID, w_COLLECT, w_FOLLOW].
enum class Objective : std::uint8_t { Avoid = 0, Collect = 1, Follow = 2 };

inline constexpr std::array<Objective, 3> kObjectives{Objective::Avoid, Objective::Collect,
                                                      Objective::Follow};

constexpr FeatureType feature_type_of(Objective o) {
    switch (o) {
    case Objective::Avoid: return FeatureType::Obstacle;
    case Objective::Collect: return FeatureType::Litter;
    case Objective::Follow: return FeatureType::Waypoint;
    }
    return FeatureType::Obstacle;
}

constexpr Objective objective_of(FeatureType t) {
    switch (t) {
    case FeatureType::Obstacle: return Objective::Avoid;
    case FeatureType::Litter: return Objective::Collect;
    case FeatureType::Waypoint: return Objective::Follow;
    }
    return Objective::Avoid;
}

constexpr std::size_t index_of(Objective o) { return static_cast<std::size_t>(o); }
constexpr std::size_t index_of(Movement m) { return static_cast<std::size_t>(m); }
constexpr std::size_t index_of(FeatureType t) { return static_cast<std::size_t>(t); }

struct ObjectiveWeights {
    std::array<double, 3> w{1.0 / 3, 1.0 / 3, 1.0 / 3};

    double operator[](Objective o) const { return w[index_of(o)]; }
    bool operator==(const ObjectiveWeights&) const = default;
};

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

std::string_view to_string(Movement m);
std::string_view to_string(FeatureType t);
std::string_view to_string(Objective o);
std::optional<Movement> parse_movement(std::string_view s);
std::optional<FeatureType> parse_feature_type(std::string_view s);
std::optional<Objective> parse_objective(std::string_view s);

std::string to_string(Location l);
std::string to_string(const HumanPosition& p);

}  // namespace cogverify
