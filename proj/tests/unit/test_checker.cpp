#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cogverify/brute_force.hpp"
#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"
#include "cogverify/parallel.hpp"
#include "fixtures.hpp"

namespace cogverify {
namespace {

constexpr double kEps = 1e-10;
const SolverConfig kTight{kEps, 10'000'000};

// 0 chooses between a (3/4 to goal) and b (1/2 to goal); 1 goal; 2 sink.
StochasticGame choice_model() {
    GameBuilder b;
    b.add_state();
    b.add_named_action("a");
    b.add_branch(1, 0.75);
    b.add_branch(2, 0.25);
    b.add_named_action("b");
    b.add_branch(1, 0.5);
    b.add_branch(2, 0.5);
    for (int i = 0; i < 2; ++i) {
        b.add_state();
        b.add_named_action("loop");
        b.add_branch(static_cast<StateIndex>(i + 1), 1.0);
    }
    auto g = b.finish();
    g.set_atom("goal", {0, 1, 0});
    return g;
}

Scheduler completed(const StochasticGame& g, Scheduler s) {
    for (StateIndex i = 0; i < g.num_states(); ++i)
        if (s.choice[i] < 0) s.choice[i] = 0;
    return s;
}

testing::RandomModel small_model(std::mt19937_64& rng, bool game = false) {
    testing::RandomModelOptions opt;
    opt.max_states = 8;
    opt.game = game;
    return testing::random_model(rng, opt);
}

TEST(Checker, SimpleChoice) {
    const auto g = choice_model();
    const auto mx = reach(g, g.atom("goal"), Direction::Max, kTight);
    const auto mn = reach(g, g.atom("goal"), Direction::Min, kTight);
    EXPECT_NEAR(mx.at(0), 0.75, 1e-12);
    EXPECT_NEAR(mn.at(0), 0.5, 1e-12);
    EXPECT_EQ(mx.scheduler.choice[0], 0);
    EXPECT_EQ(mn.scheduler.choice[0], 1);
    EXPECT_DOUBLE_EQ(mx.at(1), 1.0);
    EXPECT_DOUBLE_EQ(mx.at(2), 0.0);
}

TEST(Checker, EmptyTargetGivesZeroAndFullTargetOne) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const auto rm = small_model(rng);
        const StateMask none(rm.game.num_states(), 0), all(rm.game.num_states(), 1);
        for (auto d : {Direction::Min, Direction::Max}) {
            for (double v : reach(rm.game, none, d).values) EXPECT_EQ(v, 0.0);
            for (double v : reach(rm.game, all, d).values) EXPECT_EQ(v, 1.0);
        }
    }
}

TEST(Checker, QualitativeSetsMatchOracle) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        const auto rm = small_model(rng);
        const auto& g = rm.game;
        const auto bf = brute_force_reach(g, rm.target);
        const std::vector<std::uint8_t> exist(g.num_states(), 1), forall(g.num_states(), 0);
        const auto p0max = qualitative_prob0(g, rm.target, exist);
        const auto p1max = qualitative_prob1(g, rm.target, exist);
        const auto p0min = qualitative_prob0(g, rm.target, forall);
        const auto p1min = qualitative_prob1(g, rm.target, forall);
        for (StateIndex s = 0; s < g.num_states(); ++s) {
            EXPECT_EQ(p0max[s] != 0, bf.max[s] < 1e-12);
            EXPECT_EQ(p1max[s] != 0, bf.max[s] > 1 - 1e-12);
            EXPECT_EQ(p0min[s] != 0, bf.min[s] < 1e-12);
            EXPECT_EQ(p1min[s] != 0, bf.min[s] > 1 - 1e-12);
        }
    }
}

TEST(Checker, ReachMatchesBruteForce) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 300; ++i) {
        const auto rm = small_model(rng);
        const auto bf = brute_force_reach(rm.game, rm.target);
        const auto mx = reach(rm.game, rm.target, Direction::Max, kTight);
        const auto mn = reach(rm.game, rm.target, Direction::Min, kTight);
        for (StateIndex s = 0; s < rm.game.num_states(); ++s) {
            EXPECT_NEAR(mx.at(s), bf.max[s], 1e-6);
            EXPECT_NEAR(mn.at(s), bf.min[s], 1e-6);
            EXPECT_LE(mn.at(s), mx.at(s) + 1e-12);
            EXPECT_GE(mn.at(s), 0.0);
            EXPECT_LE(mx.at(s), 1.0);
        }
    }
}

TEST(Checker, SchedulerReplayReproducesValue) {
    std::mt19937_64 rng(10);
    const SolverConfig cfg{1e-6, 1'000'000};
    for (int i = 0; i < 200; ++i) {
        const auto rm = small_model(rng);
        const auto bf = brute_force_reach(rm.game, rm.target);
        for (auto d : {Direction::Min, Direction::Max}) {
            const auto v = reach(rm.game, rm.target, d, cfg);
            const auto mc = induced_chain(rm.game, completed(rm.game, v.scheduler));
            const auto exact = brute_force_reach(mc, rm.target);
            const auto& opt = d == Direction::Max ? bf.max : bf.min;
            for (StateIndex s = 0; s < rm.game.num_states(); ++s)
                EXPECT_NEAR(exact.max[s], opt[s], 2 * cfg.epsilon) << to_string(d) << " state " << s;
        }
    }
}

TEST(Checker, BoundedMatchesBruteForceAndIsMonotone) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        const auto rm = small_model(rng);
        const auto unb = reach(rm.game, rm.target, Direction::Max, kTight);
        std::vector<double> prev(rm.game.num_states(), 0.0);
        for (std::size_t k = 0; k <= 5; ++k) {
            const auto bf = brute_force_bounded_reach(rm.game, rm.target, k);
            const auto mx = bounded_reach(rm.game, rm.target, k, Direction::Max);
            const auto mn = bounded_reach(rm.game, rm.target, k, Direction::Min);
            for (StateIndex s = 0; s < rm.game.num_states(); ++s) {
                EXPECT_NEAR(mx.at(s), bf.max[s], 1e-12);
                EXPECT_NEAR(mn.at(s), bf.min[s], 1e-12);
                EXPECT_GE(mx.at(s), prev[s] - 1e-15);
                EXPECT_LE(mx.at(s), unb.at(s) + 1e-9);
                prev[s] = mx.at(s);
            }
        }
    }
}

TEST(Checker, BoundedZeroStepsIsTheIndicator) {
    const auto g = choice_model();
    const auto v = bounded_reach(g, g.atom("goal"), 0, Direction::Max);
    EXPECT_EQ(v.values, (std::vector<double>{0, 1, 0}));
}

TEST(Checker, ExpectedRewardMatchesBruteForce) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const auto rm = small_model(rng);
        StateActionReward r;
        for (std::size_t a = 0; a < rm.game.num_actions(); ++a) r.values.push_back(u(rng));
        const auto bf = brute_force_reward(rm.game, r, rm.target);
        const auto mx = expected_reward(rm.game, r, rm.target, Direction::Max, kTight);
        const auto mn = expected_reward(rm.game, r, rm.target, Direction::Min, kTight);
        for (StateIndex s = 0; s < rm.game.num_states(); ++s) {
            if (std::isinf(bf.max[s])) EXPECT_TRUE(std::isinf(mx.at(s))) << s;
            else EXPECT_NEAR(mx.at(s), bf.max[s], 1e-6 * std::max(1.0, bf.max[s]));
            if (std::isinf(bf.min[s])) EXPECT_TRUE(std::isinf(mn.at(s))) << s;
            else EXPECT_NEAR(mn.at(s), bf.min[s], 1e-6 * std::max(1.0, bf.min[s]));
        }
    }
}

TEST(Checker, GameMatchesBruteForceAndIsBracketed) {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 200; ++i) {
        auto rm = small_model(rng, true);
        const auto& g = rm.game;
        const auto bf = brute_force_sg_maxmin(g, rm.target);
        const auto v = sg_maxmin_reach(g, rm.target, kTight);
        const auto lo = reach(g, rm.target, Direction::Min, kTight);
        const auto hi = reach(g, rm.target, Direction::Max, kTight);
        for (StateIndex s = 0; s < g.num_states(); ++s) {
            EXPECT_NEAR(v.at(s), bf.maxmin[s], 1e-6);
            EXPECT_LE(lo.at(s), v.at(s) + 1e-9);
            EXPECT_LE(v.at(s), hi.at(s) + 1e-9);
        }
        // The coalition controls every state, so it does at least as well.
        const auto c = reach(coalition_mdp(g), rm.target, Direction::Max, kTight);
        for (StateIndex s = 0; s < g.num_states(); ++s) EXPECT_GE(c.at(s), v.at(s) - 1e-9);
    }
}

TEST(Checker, GameSchedulerReplay) {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 100; ++i) {
        auto rm = small_model(rng, true);
        const auto bf = brute_force_sg_maxmin(rm.game, rm.target);
        const auto v = sg_maxmin_reach(rm.game, rm.target, {1e-6, 1'000'000});
        const auto mc = induced_chain(rm.game, completed(rm.game, v.scheduler));
        const auto exact = brute_force_reach(mc, rm.target);
        for (StateIndex s = 0; s < rm.game.num_states(); ++s) EXPECT_NEAR(exact.max[s], bf.maxmin[s], 2e-6);
    }
}

TEST(Checker, EndComponents) {
    // 0 <-> 1 can cycle; 1 may also leave to 2, which is absorbing.
    GameBuilder b;
    b.add_state();
    b.add_named_action("x");
    b.add_branch(1, 1.0);
    b.add_state();
    b.add_named_action("back");
    b.add_branch(0, 1.0);
    b.add_named_action("out");
    b.add_branch(0, 0.5);
    b.add_branch(2, 0.5);
    b.add_state();
    b.add_named_action("loop");
    b.add_branch(2, 1.0);
    const auto g = b.finish();
    const StateMask all(3, 1);
    const std::vector<std::uint8_t> acts(g.num_actions(), 1);
    const auto mec = maximal_end_components(g, all, acts);
    EXPECT_GE(mec[0], 0);
    EXPECT_EQ(mec[0], mec[1]);
    EXPECT_GE(mec[2], 0);
    EXPECT_NE(mec[2], mec[0]);
    const auto without2 = maximal_end_components(g, StateMask{1, 1, 0}, acts);
    EXPECT_EQ(without2[0], without2[1]);
    EXPECT_EQ(without2[2], -1);
}

TEST(Checker, ToyValuesAndBounds) {
    const auto spec = testing::load_data_scenario("toy");
    const auto m = build_human_mdp(spec, testing::load_data_qtables("toy"));
    const auto& goal = m.game.atom("goal");
    const auto mx = reach(m.game, goal, Direction::Max, kTight);
    const auto mn = reach(m.game, goal, Direction::Min, kTight);
    EXPECT_NEAR(mx.at(m.game.initial()), 0.70478, 5e-6);
    EXPECT_NEAR(mn.at(m.game.initial()), 0.69690, 5e-6);
    EXPECT_TRUE(mx.converged);
}

TEST(Checker, ResultsIndependentOfThreadCount) {
    const auto spec = testing::load_data_scenario("toy");
    const auto m = build_human_mdp(spec, testing::load_data_qtables("toy"));
    const auto& goal = m.game.atom("goal");
    set_thread_count(1);
    const auto a = reach(m.game, goal, Direction::Max);
    const auto ab = bounded_reach(m.game, goal, 7, Direction::Min);
    set_thread_count(4);
    const auto b = reach(m.game, goal, Direction::Max);
    const auto bb = bounded_reach(m.game, goal, 7, Direction::Min);
    set_thread_count(0);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.scheduler.choice, b.scheduler.choice);
    EXPECT_EQ(ab.values, bb.values);
}

TEST(Checker, NonConvergenceIsReported) {
    // A slow geometric chain cannot converge in two sweeps.
    GameBuilder b;
    b.add_state();
    b.add_named_action("slow");
    b.add_branch(0, 0.98);
    b.add_branch(1, 0.01);
    b.add_branch(2, 0.01);
    for (StateIndex i = 1; i <= 2; ++i) {
        b.add_state();
        b.add_named_action("loop");
        b.add_branch(i, 1.0);
    }
    const auto g = b.finish();
    const auto v = reach(g, StateMask{0, 1, 0}, Direction::Max, {1e-12, 2});
    EXPECT_FALSE(v.converged);
}

TEST(BruteForce, SchedulerCountAndCap) {
    const auto g = choice_model();
    EXPECT_EQ(scheduler_count(g, g.atom("goal")), 2u);
    OracleConfig tiny;
    tiny.cap = 1;
    EXPECT_THROW(brute_force_reach(g, g.atom("goal"), tiny), ModelError);
    const auto k = keep_first_action(g, StateMask{0, 0, 0});
    EXPECT_EQ(scheduler_count(k, k.atom("goal")), 1u);
}

}  // namespace
}  // namespace cogverify
