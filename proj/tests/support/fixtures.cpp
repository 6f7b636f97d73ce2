#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cogverify::testing {

std::filesystem::path data_path(const std::string& relative) {
    return std::filesystem::path(COGVERIFY_DATA_DIR) / relative;
}

ScenarioSpec load_data_scenario(const std::string& name) {
    return load_scenario(data_path("scenarios/" + name + ".yaml"));
}

QTableSet load_data_qtables(const std::string& name) {
    return load_qtables(data_path("qtables/" + name + ".yaml"));
}

RandomModel random_model(std::mt19937_64& rng, const RandomModelOptions& opt) {
    std::uniform_int_distribution<std::size_t> nd(opt.min_states, opt.max_states);
    const std::size_t n = nd(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<std::size_t> acts(1, opt.max_actions);
    std::uniform_int_distribution<std::size_t> brs(1, opt.max_branches);

    RandomModel out;
    out.target.assign(n, 0);
    out.target[pick(rng)] = 1;
    std::vector<std::uint8_t> sink(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (u(rng) < opt.target_rate) out.target[s] = 1;
        else if (!out.target[s] && u(rng) < opt.sink_rate) sink[s] = 1;
    }
    GameBuilder b(n);
    for (std::size_t s = 0; s < n; ++s) {
        const Player p = opt.game && u(rng) < 0.5 ? Player::Box : Player::Circle;
        b.add_state(p);
        if (sink[s]) {
            b.add_named_action("loop");
            b.add_branch(static_cast<StateIndex>(s), 1.0);
            continue;
        }
        const std::size_t k = acts(rng);
        for (std::size_t a = 0; a < k; ++a) {
            b.add_named_action("a" + std::to_string(a));
            const std::size_t m = brs(rng);
            std::vector<double> w(m);
            double sum = 0.0;
            for (auto& x : w) sum += x = 0.05 + u(rng);
            for (std::size_t j = 0; j < m; ++j) b.add_branch(static_cast<StateIndex>(pick(rng)), w[j] / sum);
        }
    }
    b.set_initial(0);
    out.game = b.finish();
    return out;
}

ScenarioSpec random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& opt) {
    std::uniform_int_distribution<int> side(opt.min_side, opt.max_side);
    ScenarioSpec spec;
    spec.env.grid = {side(rng), side(rng)};
    const Grid g = spec.env.grid;
    std::uniform_int_distribution<int> xs(0, g.width - 1), ys(0, g.height - 1), os(0, 7);
    spec.init_h = {{xs(rng), ys(rng)}, Orientation(os(rng))};
    std::set<Location> used{spec.init_h.loc};
    const int free_cells = g.cell_count() - 1;
    int id = 1;
    auto place = [&](FeatureType t, int max_count) {
        const int want = std::uniform_int_distribution<int>(0, max_count)(rng);
        for (int i = 0; i < want && static_cast<int>(used.size()) <= free_cells; ++i) {
            Location l;
            do {
                l = {xs(rng), ys(rng)};
            } while (used.count(l));
            used.insert(l);
            spec.env.features.push_back({t, l, id++});
        }
    };
    place(FeatureType::Obstacle, opt.max_obstacles);
    place(FeatureType::Litter, opt.max_litter);
    place(FeatureType::Waypoint, opt.max_waypoints);
    const int gy = ys(rng);
    spec.env.goal = GoalRegion::rectangle({0, gy}, {g.width - 1, gy});
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const double a = u(rng), c = u(rng), f = u(rng);
    spec.weights.w = {a / (a + c + f), c / (a + c + f), 0.0};
    spec.weights.w[2] = 1.0 - spec.weights.w[0] - spec.weights.w[1];
    spec.temperature = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    if (opt.robot) {
        RobotSpec r;
        r.start = {{xs(rng), ys(rng)}, Orientation(2 * std::uniform_int_distribution<int>(0, 3)(rng))};
        r.goal = GoalRegion({{xs(rng), ys(rng)}});
        r.mode = u(rng) < 0.5 ? RobotMode::Ignored : RobotMode::ObstacleFeature;
        spec.robot = r;
    }
    validate_scenario(spec);
    return spec;
}

QTableSet synthetic_qtables(double avoid, double collect, double follow) {
    const std::vector<double> centers{-157.5, -112.5, -67.5, -30, 0, 30, 67.5, 112.5, 157.5};
    const std::vector<double> dists{0.7, 1.5, 2.5, 4.5, 4.5};
    BinAxis angle({parse_interval("[-180,-135)"), parse_interval("[-135,-90)"), parse_interval("[-90,-45)"),
                   parse_interval("[-45,-15)"), parse_interval("[-15,15]"), parse_interval("(15,45]"),
                   parse_interval("(45,90]"), parse_interval("(90,135]"), parse_interval("(135,180]")});
    BinAxis distance({parse_interval("[0,1]"), parse_interval("(1,2]"), parse_interval("(2,3]"),
                      parse_interval("(3,5]"), parse_interval("(5,inf)")});
    return make_qtables(angle, distance, AngleSign::LeftPositive, [&](Objective o, Movement m, int a, int d) {
        const double turn = m == Movement::Left ? 45 : m == Movement::Right ? -45 : 0;
        const double c = std::cos((centers[static_cast<std::size_t>(a)] - turn) * M_PI / 180.0);
        const double shape = std::max(0.0, c) * std::max(0.0, c);
        const double dd = dists[static_cast<std::size_t>(d)];
        switch (o) {
        case Objective::Avoid: return -avoid * shape / (1 + dd);
        case Objective::Collect: return collect * shape / (1 + 0.25 * dd);
        case Objective::Follow: return follow * shape / (1 + 0.25 * dd);
        }
        return 0.0;
    });
}

std::size_t count_choice_states(const StochasticGame& g) {
    std::size_t n = 0;
    for (StateIndex s = 0; s < g.num_states(); ++s) n += g.action_count(s) > 1;
    return n;
}

}  // namespace cogverify::testing
