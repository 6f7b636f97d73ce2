#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"

namespace cogverify {

/// Boolean combination of state labels.
struct LabelExpr {
    enum class Op { True, False, Label, Not, And, Or };
    Op op = Op::True;
    std::string name;  // Label
    std::vector<LabelExpr> args;

    StateMask evaluate(const StochasticGame& g) const;
    std::string to_string() const;
};

enum class Comparison { Less, LessEqual, Greater, GreaterEqual };

std::string_view to_string(Comparison c);

/// Queries of the form
///   Pmax(F goal)   Pmin<=0.2(F<=10 stuck | obstacle_hit)   Emin[collect](F goal)
/// A reward name (collect, avoid, follow, steps) applies to E queries only and
/// defaults to steps.
struct Property {
    enum class Kind { Probability, Reward };
    Kind kind = Kind::Probability;
    Direction dir = Direction::Max;
    std::optional<std::size_t> step_bound;
    std::string reward = "steps";
    std::optional<Comparison> cmp;
    double threshold = 0.0;
    LabelExpr target;
    std::string text;  // normalized form

    bool is_bounded() const { return step_bound.has_value(); }
};

/// Throws InputError with a 1-based column on malformed text.
Property parse_property(std::string_view text);

/// A ';'-separated list.
std::vector<Property> parse_properties(std::string_view text);

struct PropertyResult {
    Property property;
    double min = 0.0;  // at the initial state
    double max = 0.0;
    double gap = 0.0;  // max - min
    double value = 0.0;  // in the queried direction
    std::optional<bool> satisfied;
    std::size_t iterations = 0;  // summed over both directions
    bool converged = true;
    Verdict verdict;  // queried direction
};

/// Evaluates both directions on the model (player tags ignored, so games are
/// read as their coalition MDP).
PropertyResult evaluate_property(const BuiltModel& m, const Property& p, const SolverConfig& cfg = {});

/// Reward structure behind a reward name ("collect", "avoid", "follow" or
/// "steps").
RewardFunction named_reward(const BuiltModel& m, const std::string& name);

bool compare(double value, Comparison c, double threshold);

}  // namespace cogverify
