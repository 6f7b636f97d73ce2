#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cogverify/geometry.hpp"
#include "cogverify/qtable.hpp"
#include "cogverify/types.hpp"

namespace cogverify {

/// Feature slot values besides indices into Environment::features.
inline constexpr int kNoFeature = -1;
inline constexpr int kRobotFeature = -2;

/// What happens to movements that would leave the grid.
///   Block: the movement is ruled out (value -inf); a position with no valid
///          movement gets an absorbing stuck self-loop.
///   Fall:  the movement keeps its softmax mass and leads to a single absorbing
///          stuck state outside the grid.
enum class DeadlockPolicy { Block, Fall };

using MovementVector = std::array<double, 3>;

/// Positions of the human and (optionally) the robot when it acts as an obstacle.
struct Scene {
    Situation s;
    std::optional<Location> robot_obstacle;
};

struct ObjectiveEntry {
    int feature = kNoFeature;
    MovementVector values{0, 0, 0};
    bool confident = true;
};

struct ValuationEntry {
    std::array<int, 3> triple{kNoFeature, kNoFeature, kNoFeature};  // indexed by Objective
    MovementVector values{0, 0, 0};
    bool confident = true;
};

using Valuation = std::vector<ValuationEntry>;

/// Present features of the objective's type, in environment order.
std::vector<int> relevant_features(const Environment& env, const Scene& sc, Objective o);

/// Relevant features at the minimal squared distance. The robot obstacle joins
/// AVOID's candidates unless it shares the human's cell.
std::vector<int> closest_relevant(const Environment& env, const Scene& sc, Objective o);

/// Closest relevant feature after tie-breaking on smallest absolute angle, then
/// left of the human; kNoFeature if there is none.
int unique_closest(const Environment& env, const Scene& sc, Objective o);

/// Strict total order on candidate cells used by unique_closest: squared
/// distance, then absolute bearing, then left before right. Exact integer math.
bool closer_in_total_order(const HumanPosition& p, Location a, Location b);

Location slot_location(const Environment& env, const Scene& sc, int slot);

std::vector<ObjectiveEntry> objective_movement_values(const Environment& env, const QTableSet& q,
                                                      const Scene& sc, Objective o,
                                                      bool unique = false);

/// Cross product of the per-objective entries, weighted and summed. Invalid
/// movements are set to -inf under DeadlockPolicy::Block and entries with no
/// finite value are dropped.
Valuation combine(const Environment& env, const QTableSet& q, const ObjectiveWeights& w,
                  const Scene& sc, DeadlockPolicy policy = DeadlockPolicy::Block,
                  bool unique = false);

/// Throws ModelError if every entry is -inf.
MovementVector softmax(const MovementVector& v, double tau);

bool all_confident(const Valuation& v);

}  // namespace cogverify
