// One line per acceptance criterion; exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cogverify/behavior.hpp"
#include "cogverify/brute_force.hpp"
#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"
#include "cogverify/parallel.hpp"
#include "cogverify/prism_export.hpp"
#include "cogverify/property.hpp"
#include "cogverify/simulation.hpp"
#include "fixtures.hpp"

namespace cogverify {
namespace {

// Pinned tolerances and limits.
constexpr double kGeomTol = 1e-9;
constexpr double kOracleTol = 1e-6;
constexpr double kOracleSolverEps = 1e-9;
constexpr double kSumTol = 1e-12;
constexpr double kShiftTol = 1e-10;
constexpr double kShapeDrop = 0.3;
constexpr double kGapMin = 1e-6;
constexpr double kRewardTol = 1e-8;
constexpr double kRewardSolverEps = 1e-12;
constexpr std::size_t kEnumerationCap = 10'000;
constexpr std::size_t kPairCap = 1'000'000;

constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 120.0;
constexpr double kLimit3 = 300.0;
constexpr double kLimit4 = 10.0;
constexpr double kLimit5 = 60.0;
constexpr double kLimit6 = 30.0;
constexpr double kLimit7 = 120.0;
constexpr double kLimit8 = 600.0;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string digest;  // values that must not change between runs
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void fail(Outcome& o, const std::string& why) {
    if (o.pass) o.detail = why;
    o.pass = false;
}

void digest(Outcome& o, double v) { o.digest += g17(v) + ";"; }

void digest(Outcome& o, const std::vector<double>& v) {
    for (double x : v) digest(o, x);
}

/// Keeps all actions at the first non-target choice states (by index) while
/// the enumeration stays under `cap`; others keep only their first action.
StochasticGame restrict_choices(const StochasticGame& g, const StateMask& target, std::size_t cap) {
    StateMask keep(g.num_states(), 0);
    double total = 1.0;
    for (StateIndex s = 0; s < g.num_states(); ++s) {
        if (target[s] || g.action_count(s) < 2) continue;
        if (total * static_cast<double>(g.action_count(s)) > static_cast<double>(cap)) continue;
        total *= static_cast<double>(g.action_count(s));
        keep[s] = 1;
    }
    return keep_first_action(g, keep);
}

/// Same, but grows the kept set breadth-first from the initial state.
StochasticGame restrict_choices_bfs(const StochasticGame& g, const StateMask& target, std::size_t cap) {
    std::vector<StateIndex> order{g.initial()};
    std::vector<std::uint8_t> seen(g.num_states(), 0);
    seen[g.initial()] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto a = g.action_begin(order[i]); a < g.action_end(order[i]); ++a)
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                if (!seen[g.target(b)]) {
                    seen[g.target(b)] = 1;
                    order.push_back(g.target(b));
                }
    StateMask keep(g.num_states(), 0);
    double total = 1.0;
    for (StateIndex s : order) {
        if (target[s] || g.action_count(s) < 2) continue;
        if (total * static_cast<double>(g.action_count(s)) > static_cast<double>(cap)) continue;
        total *= static_cast<double>(g.action_count(s));
        keep[s] = 1;
    }
    return keep_first_action(g, keep);
}

bool near(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol;
}

// ---------------------------------------------------------------------------

Outcome worked_example() {
    Outcome o;
    const ScenarioSpec spec = testing::load_data_scenario("toy");
    const QTableSet q = testing::load_data_qtables("toy");
    const Environment& env = spec.env;
    auto idx = [&](int id) { return env.index_of_id(id); };
    const HumanPosition h{{2, 1}, Orientation(2)};
    const Location f9 = env.features[static_cast<std::size_t>(idx(9))].loc;
    const double d = distance(h.loc, f9), a = signed_angle(h, f9);
    if (std::abs(d - 2 * std::sqrt(2.0)) > kGeomTol) fail(o, "distance to f9 " + g17(d));
    if (std::abs(a + std::numbers::pi / 4) > kGeomTol) fail(o, "angle to f9 " + g17(a));
    const Scene sc{{h, FeatureSet::all(env.features.size()).without(idx(1))}, std::nullopt};
    const auto close = closest_relevant(env, sc, Objective::Avoid);
    if (close != std::vector<int>{idx(5), idx(6)}) fail(o, "Close(AVOID) is not {f5,f6}");
    if (unique_closest(env, sc, Objective::Avoid) != idx(5)) fail(o, "tie-break does not pick f5");
    const auto qmv = objective_movement_values(env, q, sc, Objective::Avoid);
    const std::vector<std::pair<int, MovementVector>> want{{idx(5), {0, -0.67, -0.32}}, {idx(6), {-0.01, 0, 0}}};
    if (qmv.size() != want.size()) {
        fail(o, "QMV size " + std::to_string(qmv.size()));
    } else {
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (qmv[i].feature != want[i].first || qmv[i].values != want[i].second) fail(o, "QMV entry differs");
            digest(o, std::vector<double>(qmv[i].values.begin(), qmv[i].values.end()));
        }
    }
    digest(o, d);
    digest(o, a);
    if (o.pass) o.detail = "d=2.828427, angle=-pi/4, Close={f5,f6}, unique=f5, QMV exact";
    return o;
}

Outcome mdp_oracle() {
    Outcome o;
    const SolverConfig cfg{kOracleSolverEps, 100'000'000};
    double worst = 0.0;
    std::size_t checked = 0;
    auto compare = [&](const StochasticGame& g, const StateMask& t, const std::string& what, std::mt19937_64& rng) {
        const auto bf = brute_force_reach(g, t);
        const auto mx = reach(g, t, Direction::Max, cfg), mn = reach(g, t, Direction::Min, cfg);
        for (StateIndex s = 0; s < g.num_states(); ++s) {
            worst = std::max({worst, std::abs(mx.at(s) - bf.max[s]), std::abs(mn.at(s) - bf.min[s])});
            if (!near(mx.at(s), bf.max[s], kOracleTol) || !near(mn.at(s), bf.min[s], kOracleTol))
                fail(o, what + ": reach differs at state " + std::to_string(s));
        }
        digest(o, mx.values);
        digest(o, mn.values);
        for (std::size_t k : {2u, 5u}) {
            const auto bb = brute_force_bounded_reach(g, t, k);
            const auto bx = bounded_reach(g, t, k, Direction::Max), bn = bounded_reach(g, t, k, Direction::Min);
            for (StateIndex s = 0; s < g.num_states(); ++s) {
                worst = std::max({worst, std::abs(bx.at(s) - bb.max[s]), std::abs(bn.at(s) - bb.min[s])});
                if (!near(bx.at(s), bb.max[s], kOracleTol) || !near(bn.at(s), bb.min[s], kOracleTol))
                    fail(o, what + ": bounded reach differs at state " + std::to_string(s));
            }
            digest(o, bx.values);
        }
        std::uniform_real_distribution<double> u(0.0, 2.0);
        StateActionReward r;
        for (std::size_t a = 0; a < g.num_actions(); ++a) r.values.push_back(u(rng));
        const auto br = brute_force_reward(g, r, t);
        const auto ex = expected_reward(g, r, t, Direction::Max, cfg), en = expected_reward(g, r, t, Direction::Min, cfg);
        for (StateIndex s = 0; s < g.num_states(); ++s) {
            const double tol = kOracleTol * std::max(1.0, std::isfinite(br.max[s]) ? br.max[s] : 1.0);
            if (!near(ex.at(s), br.max[s], tol) || !near(en.at(s), br.min[s], tol))
                fail(o, what + ": expected reward differs at state " + std::to_string(s));
            if (std::isfinite(br.max[s])) worst = std::max(worst, std::abs(ex.at(s) - br.max[s]) / std::max(1.0, br.max[s]));
        }
        digest(o, en.values);
        ++checked;
    };
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        testing::RandomModelOptions opt;
        opt.max_states = 50;
        opt.max_actions = 3;
        const auto rm = testing::random_model(rng, opt);
        compare(restrict_choices(rm.game, rm.target, kEnumerationCap), rm.target, "random MDP " + std::to_string(i),
                rng);
    }
    for (const char* name : {"small3", "small4", "small4b"}) {
        const auto m = build_human_mdp(testing::load_data_scenario(name), testing::load_data_qtables("synthetic"));
        const StateMask t = m.game.atom("goal");
        compare(restrict_choices_bfs(m.game, t, kEnumerationCap), t, name, rng);
    }
    if (o.pass) o.detail = std::to_string(checked) + " models, worst deviation " + g17(worst);
    return o;
}

Outcome sg_oracle() {
    Outcome o;
    const SolverConfig cfg{kOracleSolverEps, 100'000'000};
    double worst = 0.0;
    std::size_t bracket_fail = 0;
    auto compare = [&](const StochasticGame& g, const StateMask& t, const std::string& what) {
        const auto bf = brute_force_sg_maxmin(g, t);
        const auto v = sg_maxmin_reach(g, t, cfg);
        const auto lo = reach(g, t, Direction::Min, cfg), hi = reach(g, t, Direction::Max, cfg);
        for (StateIndex s = 0; s < g.num_states(); ++s) {
            worst = std::max(worst, std::abs(v.at(s) - bf.maxmin[s]));
            if (!near(v.at(s), bf.maxmin[s], kOracleTol)) fail(o, what + ": maxmin differs at " + std::to_string(s));
            if (lo.at(s) > v.at(s) + kOracleTol || v.at(s) > hi.at(s) + kOracleTol) {
                ++bracket_fail;
                fail(o, what + ": bracketing fails at " + std::to_string(s));
            }
        }
        digest(o, v.values);
    };
    std::mt19937_64 rng(77);
    for (int i = 0; i < 50; ++i) {
        testing::RandomModelOptions opt;
        opt.max_states = 12;
        opt.game = true;
        const auto rm = testing::random_model(rng, opt);
        compare(restrict_choices(rm.game, rm.target, kPairCap), rm.target, "random game " + std::to_string(i));
    }
    const ScenarioSpec spec = testing::load_data_scenario("robot4");
    const BuiltModel m = compose_sg(spec, testing::load_data_qtables("synthetic"), {});
    const StateMask t = m.game.atom("goal");
    const StochasticGame r = restrict_choices_bfs(m.game, t, kPairCap);
    compare(r, t, "robot4");
    if (o.pass)
        o.detail = "51 games (robot4: " + std::to_string(scheduler_count(r, t)) + " scheduler pairs), worst deviation " +
                   g17(worst) + ", bracketing holds";
    return o;
}

Outcome softmax_suite() {
    Outcome o;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> val(-10.0, 10.0), shift(-100.0, 100.0), logtau(-3.0, 3.0);
    std::uniform_int_distribution<int> ninf(0, 2), slot(0, 2);
    double worst_sum = 0.0, worst_shift = 0.0;
    double chk = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        MovementVector v{val(rng), val(rng), val(rng)};
        const int drops = i % 4 == 0 ? ninf(rng) : 0;
        for (int d = 0; d < drops; ++d) v[static_cast<std::size_t>(slot(rng))] = -kInfinity;
        const double tau = std::pow(10.0, logtau(rng));
        const MovementVector p = softmax(v, tau);
        const double sum = p[0] + p[1] + p[2];
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        if (std::abs(sum - 1.0) > kSumTol) fail(o, "sum off by " + g17(sum - 1.0));
        const double c = shift(rng);
        MovementVector w = v;
        for (auto& x : w) x += c;
        const MovementVector q = softmax(w, tau);
        for (int j = 0; j < 3; ++j) {
            worst_shift = std::max(worst_shift, std::abs(p[j] - q[j]));
            if (std::abs(p[j] - q[j]) > kShiftTol) fail(o, "shift changes the distribution");
            if (std::isinf(v[j]) && p[j] != 0.0) fail(o, "-inf entry has mass");
        }
        const auto av = std::max_element(v.begin(), v.end()) - v.begin();
        const auto ap = std::max_element(p.begin(), p.end()) - p.begin();
        if (p[static_cast<std::size_t>(av)] != p[static_cast<std::size_t>(ap)]) fail(o, "argmax not preserved");
        chk += p[0] + 2 * p[1] + 3 * p[2];
    }
    digest(o, chk);
    if (o.pass) o.detail = "10000 vectors, worst sum error " + g17(worst_sum) + ", worst shift error " + g17(worst_shift);
    return o;
}

Outcome structural_bounds() {
    Outcome o;
    std::mt19937_64 rng(55);
    const QTableSet q = testing::synthetic_qtables();
    std::size_t states = 0, paths = 0;
    for (int i = 0; i < 20; ++i) {
        testing::RandomScenarioOptions opt;
        opt.max_side = 8;
        const ScenarioSpec spec = testing::random_scenario(rng, opt);
        const BuiltModel m = build_human_mdp(spec, q);
        const auto& g = m.game;
        std::size_t bound = 1;
        for (auto t : kFeatureTypes) bound *= std::max<std::size_t>(1, spec.env.count(t));
        for (StateIndex s = 0; s < g.num_states(); ++s)
            if (g.action_count(s) > bound) fail(o, "scenario " + std::to_string(i) + " exceeds the cubic bound");
        states += g.num_states();
        // Random walks under uniformly random choices.
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int w = 0; w < 50; ++w, ++paths) {
            StateIndex s = g.initial();
            for (int step = 0; step < 60; ++step) {
                const auto a = g.action_begin(s) + static_cast<std::uint32_t>(u(rng) * g.action_count(s));
                double r = u(rng);
                StateIndex t = g.target(g.branch_end(a) - 1);
                for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) {
                    r -= g.probability(b);
                    if (r < 0) {
                        t = g.target(b);
                        break;
                    }
                }
                if (!m.is_stuck(s) && !m.is_stuck(t) && !m.situation(t).present.subset_of(m.situation(s).present))
                    fail(o, "features reappear along a path");
                s = t;
            }
        }
        const auto e = export_human(spec, q);
        const EncodingStats st = encoding_stats(e.text);
        if (!st.within_bound()) fail(o, "scenario " + std::to_string(i) + " encoding exceeds the bound");
        digest(o, static_cast<double>(g.num_states()));
        digest(o, static_cast<double>(st.commands));
    }
    if (o.pass)
        o.detail = "20 scenarios, " + std::to_string(states) + " states, " + std::to_string(paths) +
                   " sampled paths, encodings within bound";
    return o;
}

Outcome monte_carlo_check() {
    Outcome o;
    const ScenarioSpec spec = testing::load_data_scenario("sim5");
    HumanModelConfig cfg;
    cfg.variant = HumanVariant::UniqueClosest;
    const BuiltModel m = build_human_mdp(spec, testing::load_data_qtables("synthetic"), cfg);
    const StateMask& goal = m.game.atom("goal");
    const double exact = bounded_reach(m.game, goal, 40, Direction::Max).at(m.game.initial());
    const Estimate e = monte_carlo(m.game, goal, 100'000, 40, 20240601);
    if (!(e.lo <= exact && exact <= e.hi))
        fail(o, "checker " + g17(exact) + " outside [" + g17(e.lo) + ", " + g17(e.hi) + "]");
    digest(o, exact);
    digest(o, e.estimate);
    if (o.pass)
        o.detail = "checker " + g17(exact) + " in 99% interval [" + g17(e.lo) + ", " + g17(e.hi) + "] of " +
                   std::to_string(e.samples) + " runs";
    return o;
}

Outcome fig_shape() {
    Outcome o;
    const ScenarioSpec spec = testing::load_data_scenario("corridor");
    const QTableSet q = testing::load_data_qtables("waypoint");
    HumanModelConfig cfg;
    cfg.deadlock = DeadlockPolicy::Fall;
    const SolverConfig solver{1e-9, 100'000'000};
    const LabelExpr goal{LabelExpr::Op::Label, "goal", {}};
    std::vector<double> pmax, pmin;
    const std::vector<double> taus{0.01, 0.1, 1.0, 10.0};
    double best_gap = 0.0;
    for (double tau : taus) {
        cfg.temperature = tau;
        const BuiltModel m = build_human_mdp(spec, q, cfg);
        const StateMask t = goal.evaluate(m.game);
        pmax.push_back(reach(m.game, t, Direction::Max, solver).at(m.game.initial()));
        pmin.push_back(reach(m.game, t, Direction::Min, solver).at(m.game.initial()));
        if (pmin.back() > pmax.back() + 1e-12) fail(o, "Pmin > Pmax at tau " + g17(tau));
        best_gap = std::max(best_gap, pmax.back() - pmin.back());
    }
    if (pmax.front() - pmax.back() < kShapeDrop)
        fail(o, "Pmax drop " + g17(pmax.front() - pmax.back()) + " below " + g17(kShapeDrop));
    if (best_gap <= kGapMin) fail(o, "no positive Pmin/Pmax gap");
    digest(o, pmax);
    digest(o, pmin);
    if (o.pass)
        o.detail = "Pmax " + g17(pmax.front()) + " at tau=0.01 vs " + g17(pmax.back()) + " at tau=10, max gap " +
                   g17(best_gap);
    return o;
}

Outcome desk_scale() {
    Outcome o;
    const ScenarioSpec spec = testing::load_data_scenario("large20");
    const QTableSet q = testing::load_data_qtables("synthetic");
    const BuiltModel m = build_human_mdp(spec, q);
    const StateMask& goal = m.game.atom("goal");
    const double lo = reach(m.game, goal, Direction::Min).at(m.game.initial());
    const double hi = reach(m.game, goal, Direction::Max).at(m.game.initial());
    const auto n = m.game.num_states();
    if (n < 10'000 || n > 10'000'000) fail(o, "state count " + std::to_string(n) + " outside [1e4, 1e7]");
    digest(o, static_cast<double>(n));
    digest(o, lo);
    digest(o, hi);
    if (o.pass) o.detail = std::to_string(n) + " states, Pmin " + g17(lo) + ", Pmax " + g17(hi);
    return o;
}

Outcome reward_encodings() {
    Outcome o;
    const SolverConfig cfg{kRewardSolverEps, 100'000'000};
    const QTableSet q = testing::load_data_qtables("synthetic");
    double worst = 0.0, largest = 0.0;
    std::size_t finite = 0, total = 0;
    for (const char* name : {"small4", "small4b", "robot4"}) {
        ScenarioSpec spec = testing::load_data_scenario(name);
        spec.robot.reset();
        const BuiltModel m = build_human_mdp(spec, q);
        const FlaggedModel f = first_time_flags(m);
        const StateMask tm = mask_or(m.game.atom("goal"), m.game.atom("stuck"));
        const StateMask tf = mask_or(f.model.game.atom("goal"), f.model.game.atom("stuck"));
        for (auto obj : kObjectives) {
            const StateActionReward rescaled = rescale_transition_rewards(m.game, objective_reward(m, obj));
            for (auto d : {Direction::Min, Direction::Max}) {
                const double a = expected_reward(m.game, rescaled, tm, d, cfg).at(m.game.initial());
                const double b =
                    expected_reward(f.model.game, f.rewards[index_of(obj)], tf, d, cfg).at(f.model.game.initial());
                if (!near(a, b, kRewardTol))
                    fail(o, std::string(name) + " " + std::string(to_string(obj)) + ": " + g17(a) + " vs " + g17(b));
                if (std::isfinite(a) && std::isfinite(b)) {
                    worst = std::max(worst, std::abs(a - b));
                    largest = std::max(largest, std::abs(a));
                    ++finite;
                }
                ++total;
                digest(o, a);
            }
        }
    }
    if (o.pass)
        o.detail = std::to_string(total) + " values (" + std::to_string(finite) + " finite, largest " + g17(largest) +
                   "), worst deviation " + g17(worst);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds; 0 = none
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> c{
        {1, "worked example", kLimit1, worked_example},
        {2, "MDP oracle equivalence", kLimit2, mdp_oracle},
        {3, "SG oracle equivalence", kLimit3, sg_oracle},
        {4, "softmax soundness", kLimit4, softmax_suite},
        {5, "structural bounds", kLimit5, structural_bounds},
        {6, "Monte Carlo cross-check", kLimit6, monte_carlo_check},
        {7, "temperature shape", kLimit7, fig_shape},
        {8, "desk-scale performance", kLimit8, desk_scale},
        {9, "reward encodings", 0, reward_encodings},
    };
    return c;
}

Outcome run_one(const Criterion& c, double& seconds) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && seconds > c.limit) fail(o, "took " + g17(seconds) + " s, limit " + g17(c.limit) + " s");
    return o;
}

}  // namespace
}  // namespace cogverify

// With arguments, runs only the listed criteria and skips the determinism rerun.
int main(int argc, char** argv) {
    using namespace cogverify;
    if (argc > 1) {
        bool all = true;
        for (int i = 1; i < argc; ++i) {
            const int id = std::atoi(argv[i]);
            if (id < 1 || id > static_cast<int>(criteria().size())) {
                std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
                return 2;
            }
            const auto& c = criteria()[static_cast<std::size_t>(id - 1)];
            double secs = 0;
            const Outcome o = run_one(c, secs);
            all = all && o.pass;
            std::printf("criterion %d (%s): %s  %s  [%.2f s]\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                        o.detail.c_str(), secs);
        }
        return all ? 0 : 1;
    }
    bool all = true;
    std::vector<std::string> digests;
    for (const auto& c : criteria()) {
        double secs = 0;
        const Outcome o = run_one(c, secs);
        all = all && o.pass;
        digests.push_back(o.digest);
        std::printf("criterion %d (%s): %s  %s  [%.2f s]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }

    // Criterion 10: the same digests under other worker counts.
    bool same = true;
    std::string detail;
    for (unsigned threads : {1u, 3u}) {
        set_thread_count(threads);
        for (std::size_t i = 0; i < criteria().size(); ++i) {
            double secs = 0;
            const Outcome o = run_one(criteria()[i], secs);
            if (o.digest != digests[i]) {
                same = false;
                detail += " criterion " + std::to_string(criteria()[i].id) + " differs with " +
                          std::to_string(threads) + " threads;";
            }
        }
    }
    set_thread_count(0);
    if (same) detail = "criteria 1-9 identical with 1 and 3 worker threads";
    all = all && same;
    std::printf("criterion 10 (determinism): %s  %s\n", same ? "PASS" : "FAIL", detail.c_str());
    return all ? 0 : 1;
}
