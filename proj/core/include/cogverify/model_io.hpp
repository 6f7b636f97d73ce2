#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogverify/model.hpp"
#include "cogverify/types.hpp"

namespace cogverify {

/// Line-oriented explicit format:
///
///   cogverify-explicit 1
///   states <n>
///   initial <s>
///   player <s> box                      (states default to circle)
///   action <s> <local> <label>          (optional; default label "a<local>")
///   <s> <local> <prob> <target>         (one line per branch)
///   label <name> <s> <s> ...
///   location <s> <x> <y> <orientation>  (optional per-state grid position)
///
/// Blank lines and lines starting with '#' are ignored.
struct ExplicitModel {
    StochasticGame game;
    std::vector<std::optional<HumanPosition>> locations;  // empty when none given
};

std::string write_explicit(const StochasticGame& g,
                           const std::vector<std::optional<HumanPosition>>& locations = {});
ExplicitModel read_explicit(const std::string& text);

/// Inverse of StochasticGame::label_text for the structured kinds; anything
/// else becomes a named label.
struct ParsedLabel {
    ActionLabel label;
    std::string name;  // set for ActionKind::Named
};
ParsedLabel parse_label_text(const std::string& text);

}  // namespace cogverify
