#include <benchmark/benchmark.h>

#include <string>

#include "cogverify/behavior.hpp"
#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"
#include "cogverify/prism_export.hpp"
#include "cogverify/qtable.hpp"
#include "cogverify/scenario.hpp"

namespace cogverify {
namespace {

ScenarioSpec scenario(const std::string& name) {
    return load_scenario(std::string(COGVERIFY_DATA_DIR) + "/scenarios/" + name + ".yaml");
}

QTableSet tables(const std::string& name) {
    return load_qtables(std::string(COGVERIFY_DATA_DIR) + "/qtables/" + name + ".yaml");
}

void BM_Softmax(benchmark::State& state) {
    MovementVector v{0.3, -1.2, 2.5};
    for (auto _ : state) {
        v[0] += 1e-9;
        benchmark::DoNotOptimize(softmax(v, 0.7));
    }
}
BENCHMARK(BM_Softmax);

void BM_BuildToy(benchmark::State& state) {
    const auto spec = scenario("toy");
    const auto q = tables("toy");
    for (auto _ : state) {
        auto m = build_human_mdp(spec, q);
        benchmark::DoNotOptimize(m.game.num_states());
    }
}
BENCHMARK(BM_BuildToy)->Unit(benchmark::kMillisecond);

void BM_ReachToy(benchmark::State& state) {
    const auto m = build_human_mdp(scenario("toy"), tables("toy"));
    const StateMask& goal = m.game.atom("goal");
    const auto dir = state.range(0) ? Direction::Max : Direction::Min;
    for (auto _ : state) benchmark::DoNotOptimize(reach(m.game, goal, dir).at(m.game.initial()));
    state.counters["states"] = static_cast<double>(m.game.num_states());
}
BENCHMARK(BM_ReachToy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BoundedReachToy(benchmark::State& state) {
    const auto m = build_human_mdp(scenario("toy"), tables("toy"));
    const StateMask& goal = m.game.atom("goal");
    for (auto _ : state)
        benchmark::DoNotOptimize(bounded_reach(m.game, goal, static_cast<std::size_t>(state.range(0)), Direction::Max));
}
BENCHMARK(BM_BoundedReachToy)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GameRobot4(benchmark::State& state) {
    const auto spec = scenario("robot4");
    const auto m = compose_sg(spec, tables("synthetic"), {});
    const StateMask& goal = m.game.atom("robot_goal");
    for (auto _ : state) benchmark::DoNotOptimize(sg_maxmin_reach(m.game, goal).at(m.game.initial()));
    state.counters["states"] = static_cast<double>(m.game.num_states());
}
BENCHMARK(BM_GameRobot4)->Unit(benchmark::kMillisecond);

void BM_ExportToy(benchmark::State& state) {
    const auto spec = scenario("toy");
    const auto q = tables("toy");
    for (auto _ : state) {
        auto e = export_human(spec, q);
        benchmark::DoNotOptimize(e.text.size());
    }
}
BENCHMARK(BM_ExportToy)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace cogverify

BENCHMARK_MAIN();
