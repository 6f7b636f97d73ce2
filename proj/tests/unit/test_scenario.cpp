#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cogverify/qtable.hpp"
#include "cogverify/scenario.hpp"
#include "fixtures.hpp"

namespace cogverify {
namespace {

using testing::data_path;

bool has_issue(const ValidationError& e, const std::string& needle) {
    for (const auto& i : e.issues())
        if (i.find(needle) != std::string::npos) return true;
    return false;
}

template <typename F>
ValidationError validation_error(F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e;
    }
    ADD_FAILURE() << "no ValidationError";
    return ValidationError({});
}

TEST(Scenario, ToyHasNineFeatures) {
    const ScenarioSpec s = testing::load_data_scenario("toy");
    ASSERT_EQ(s.env.features.size(), 9u);
    EXPECT_EQ(s.env.grid, (Grid{5, 5}));
    for (int i = 1; i <= 4; ++i) {
        const auto& f = s.env.features[static_cast<std::size_t>(s.env.index_of_id(i))];
        EXPECT_EQ(f.type, FeatureType::Waypoint);
        EXPECT_EQ(f.loc, (Location{2, i}));
    }
    EXPECT_EQ(s.env.features[4].loc, (Location{3, 3}));
    EXPECT_EQ(s.env.count(FeatureType::Obstacle), 3u);
    EXPECT_EQ(s.env.count(FeatureType::Litter), 2u);
    EXPECT_EQ(s.init_h, (HumanPosition{{2, 0}, Orientation(2)}));
    EXPECT_TRUE(s.env.goal.contains({0, 4}));
    EXPECT_TRUE(s.env.goal.contains({4, 4}));
    EXPECT_FALSE(s.env.goal.contains({4, 3}));
}

TEST(Scenario, DegenerateMinimum) {
    const ScenarioSpec s = parse_scenario("grid: [1, 1]\nhuman: [0, 0, 0]\nweights: [1, 0, 0]\ntemperature: 1\n");
    EXPECT_TRUE(s.env.features.empty());
    EXPECT_TRUE(s.env.goal.empty());
}

TEST(Scenario, FeatureOffGridIsRejected) {
    const auto e = validation_error([] {
        parse_scenario("grid: [4, 4]\nfeatures: [[litter, 9, 9]]\nhuman: [0, 0, 0]\nweights: [1, 0, 0]\ntemperature: 1\n");
    });
    EXPECT_TRUE(has_issue(e, "feature off-grid"));
}

TEST(Scenario, AllIssuesAreListed) {
    const auto e = validation_error([] {
        parse_scenario(
            "grid: [4, 4]\nfeatures: [[litter, 1, 1], [waypoint, 1, 1]]\nhuman: [2, 2, 0]\n"
            "weights: [0.5, 0.2, 0.2]\ntemperature: 0\n");
    });
    EXPECT_TRUE(has_issue(e, "duplicate feature location"));
    EXPECT_TRUE(has_issue(e, "weight sum"));
    EXPECT_TRUE(has_issue(e, "temperature"));
}

TEST(Scenario, HumanStartOnFeatureIsRejected) {
    const auto e = validation_error([] {
        parse_scenario("grid: [3, 3]\nfeatures: [[litter, 0, 0]]\nhuman: [0, 0, 0]\nweights: [1, 0, 0]\ntemperature: 1\n");
    });
    EXPECT_TRUE(has_issue(e, "human start"));
}

TEST(Scenario, RobotNeedsCardinalOrientation) {
    const auto e = validation_error([] {
        parse_scenario("grid: [3, 3]\nhuman: [0, 0, 0]\nweights: [1, 0, 0]\ntemperature: 1\n"
                       "robot:\n  start: [2, 2, 3]\n  goal: {cells: [[0, 2]]}\n");
    });
    EXPECT_TRUE(has_issue(e, "robot orientation"));
}

TEST(Scenario, SyntaxErrorCarriesPosition) {
    try {
        parse_scenario("grid: [3, 3\nhuman: [0, 0, 0]\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_GT(e.line(), 0);
    }
    EXPECT_THROW(parse_scenario("grid: [3, 3]\nhuman: [0, 0, 9]\nweights: [1,0,0]\ntemperature: 1\n"), InputError);
    EXPECT_THROW(parse_scenario("grid: [3, 3]\nhuman: [0, 0, 0]\nweights: [1,0,0]\ntemperature: 1\nextra: 1\n"),
                 InputError);
    EXPECT_THROW(parse_scenario("grid: [3, 3]\nfeatures: [[tree, 1, 1]]\nhuman: [0, 0, 0]\nweights: [1,0,0]\n"
                                "temperature: 1\n"),
                 InputError);
}

TEST(Scenario, WeightsByName) {
    const ScenarioSpec s = parse_scenario(
        "grid: [2, 2]\nhuman: [0, 0, 0]\nweights: {follow: 0.5, avoid: 0.5}\ntemperature: 2\n");
    EXPECT_DOUBLE_EQ(s.weights[Objective::Avoid], 0.5);
    EXPECT_DOUBLE_EQ(s.weights[Objective::Collect], 0.0);
    EXPECT_DOUBLE_EQ(s.weights[Objective::Follow], 0.5);
}

TEST(Scenario, SerializeRoundTripsRandomScenarios) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        testing::RandomScenarioOptions opt;
        opt.robot = i % 2 == 0;
        const ScenarioSpec s = testing::random_scenario(rng, opt);
        EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
    }
}

TEST(Scenario, MissingFileIsInputError) {
    EXPECT_THROW(load_scenario(data_path("scenarios/nope.yaml")), InputError);
}

TEST(IntervalTest, ParseAndContains) {
    const Interval i = parse_interval("(15,45]");
    EXPECT_FALSE(i.contains(15));
    EXPECT_TRUE(i.contains(45));
    EXPECT_TRUE(i.contains(30));
    EXPECT_EQ(i.to_string(), "(15,45]");
    const Interval far = parse_interval("(3,inf)");
    EXPECT_TRUE(far.contains(1e9));
    EXPECT_THROW(parse_interval("[1,2"), InputError);
    EXPECT_THROW(parse_interval("[a,2]"), InputError);
}

TEST(BinAxisTest, LocateAndClamp) {
    const BinAxis a({parse_interval("[-15,15]"), parse_interval("(15,45]"), parse_interval("(45,90]")});
    EXPECT_EQ(a.locate(15), 0);
    EXPECT_EQ(a.locate(15.0001), 1);
    EXPECT_EQ(a.locate(-100), 0);
    EXPECT_EQ(a.locate(170), 2);
}

TEST(BinAxisTest, RejectsBadEdges) {
    EXPECT_THROW(BinAxis(std::vector<Interval>{}), InputError);
    EXPECT_THROW(BinAxis({parse_interval("[0,1]"), parse_interval("[1,2]")}), InputError);  // edge owned twice
    EXPECT_THROW(BinAxis({parse_interval("[0,1)"), parse_interval("(1,2]")}), InputError);  // edge owned by none
    EXPECT_THROW(BinAxis({parse_interval("[0,2]"), parse_interval("(1,3]")}), InputError);  // overlap
    EXPECT_THROW(BinAxis({parse_interval("[2,1]")}), InputError);                           // non-monotone
}

TEST(QTables, ToyFileParses) {
    const QTableSet q = testing::load_data_qtables("toy");
    EXPECT_EQ(q.angle_sign(), AngleSign::RightPositive);
    const QTable& t = q.table(Objective::Avoid, Movement::Straight);
    EXPECT_EQ(t.angle.size(), 7u);
    EXPECT_EQ(t.distance.size(), 4u);
    EXPECT_DOUBLE_EQ(t.value(4, 2), -0.67);
    EXPECT_FALSE(q.has_low_confidence());
}

TEST(QTables, BearingLookupUsesTableFrame) {
    const QTableSet q = testing::load_data_qtables("toy");
    // f5 from ((2,1), north) lies about 26.6 degrees to the right.
    const double bearing = std::atan2(2.0, 1.0) - std::numbers::pi / 2;
    const QCell c = q.lookup_bearing(Objective::Avoid, Movement::Right, bearing, std::sqrt(5.0));
    EXPECT_EQ(c.angle_bin, 4);
    EXPECT_EQ(c.distance_bin, 2);
    EXPECT_DOUBLE_EQ(c.value, -0.32);
}

TEST(QTables, DegreesSnapAtBinEdges) {
    EXPECT_DOUBLE_EQ(to_degrees_snapped(std::numbers::pi / 4), 45.0);
    EXPECT_DOUBLE_EQ(to_degrees_snapped(-std::numbers::pi / 12), -15.0);
}

const char* kOneBin =
    "angle_bins: [\"[-180,180]\"]\ndistance_bins: [\"[0,inf)\"]\ntables:\n";

std::string all_tables(const std::string& skip = "") {
    std::string t = kOneBin;
    for (const char* o : {"avoid", "collect", "follow"}) {
        t += std::string("  ") + o + ":\n";
        for (const char* m : {"left", "straight", "right"}) {
            if (skip == std::string(o) + "/" + m) continue;
            t += std::string("    ") + m + ": {values: [[0.5]]}\n";
        }
    }
    return t;
}

TEST(QTables, MissingTableIsReported) {
    EXPECT_NO_THROW(parse_qtables(all_tables()));
    try {
        parse_qtables(all_tables("collect/right"));
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("missing table"), std::string::npos);
    }
}

TEST(QTables, MalformedNumbersAndShapes) {
    std::string t = all_tables();
    auto bad = t;
    bad.replace(bad.find("[[0.5]]"), 7, "[[zz]]");
    EXPECT_THROW(parse_qtables(bad), InputError);
    bad = t;
    bad.replace(bad.find("[[0.5]]"), 7, "[[0.5, 1]]");
    EXPECT_THROW(parse_qtables(bad), InputError);
    bad = t;
    bad.replace(bad.find("[0,inf)"), 7, "[3,1]");
    EXPECT_THROW(parse_qtables(bad), InputError);
}

TEST(QTables, ConfidenceFlagsAndRoundTrip) {
    std::string t = all_tables();
    t.replace(t.find("{values: [[0.5]]}"), 17, "{values: [[0.25]], confidence: [[false]]}");
    const QTableSet q = parse_qtables(t);
    EXPECT_TRUE(q.has_low_confidence());
    EXPECT_FALSE(q.table(Objective::Avoid, Movement::Left).is_confident(0, 0));
    EXPECT_EQ(parse_qtables(serialize_qtables(q)), q);
    const QTableSet toy = testing::load_data_qtables("toy");
    EXPECT_EQ(parse_qtables(serialize_qtables(toy)), toy);
}

TEST(QTables, SyntheticFileMatchesGenerator) {
    const QTableSet file = testing::load_data_qtables("synthetic");
    const QTableSet gen = testing::synthetic_qtables();
    for (auto o : kObjectives)
        for (auto m : kMovements) {
            const auto& a = file.table(o, m);
            const auto& b = gen.table(o, m);
            ASSERT_EQ(a.values.size(), b.values.size());
            for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 5e-4);
        }
}

}  // namespace
}  // namespace cogverify
