#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"
#include "cogverify/qtable.hpp"
#include "cogverify/scenario.hpp"

namespace cogverify::testing {

std::filesystem::path data_path(const std::string& relative);

ScenarioSpec load_data_scenario(const std::string& name);  // data/scenarios/<name>.yaml
QTableSet load_data_qtables(const std::string& name);      // data/qtables/<name>.yaml

struct RandomModel {
    StochasticGame game;
    StateMask target;
};

struct RandomModelOptions {
    std::size_t min_states = 2;
    std::size_t max_states = 50;
    std::size_t max_actions = 3;
    std::size_t max_branches = 3;
    bool game = false;         // random Circle/Box split
    double target_rate = 0.1;  // at least one target state is forced
    double sink_rate = 0.1;    // absorbing non-target states
};

RandomModel random_model(std::mt19937_64& rng, const RandomModelOptions& opt = {});

struct RandomScenarioOptions {
    int min_side = 2;
    int max_side = 8;
    int max_obstacles = 3;
    int max_litter = 3;
    int max_waypoints = 4;
    bool robot = false;
};

ScenarioSpec random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& opt = {});

/// Smooth attraction tables like data/qtables/synthetic.yaml, generated in code.
QTableSet synthetic_qtables(double avoid = 1.5, double collect = 1.0, double follow = 1.0);

/// Reachable-state predicate helpers.
std::size_t count_choice_states(const StochasticGame& g);

}  // namespace cogverify::testing
