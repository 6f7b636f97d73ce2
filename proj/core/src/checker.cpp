#include "cogverify/checker.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "cogverify/parallel.hpp"

namespace cogverify {

std::string_view to_string(Direction d) { return d == Direction::Min ? "min" : "max"; }

namespace {

constexpr double kTieTolerance = 1e-12;

std::vector<StateIndex> action_owner(const StochasticGame& g) {
    std::vector<StateIndex> owner(g.num_actions());
    for (StateIndex s = 0; s < g.num_states(); ++s)
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) owner[a] = s;
    return owner;
}

/// Reverse adjacency: for each state, the actions having a branch into it.
struct Predecessors {
    std::vector<std::uint32_t> begin;
    std::vector<std::uint32_t> action;
    std::vector<StateIndex> owner;

    explicit Predecessors(const StochasticGame& g) : owner(action_owner(g)) {
        const auto n = g.num_states();
        begin.assign(n + 1, 0);
        for (std::uint32_t b = 0; b < g.num_branches(); ++b) ++begin[g.target(b) + 1];
        for (std::size_t i = 0; i < n; ++i) begin[i + 1] += begin[i];
        action.resize(g.num_branches());
        std::vector<std::uint32_t> fill(begin.begin(), begin.end() - 1);
        for (std::uint32_t a = 0; a < g.num_actions(); ++a)
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) action[fill[g.target(b)]++] = a;
    }
};

void check_target(const StochasticGame& g, const StateMask& target) {
    if (target.size() != g.num_states()) throw ModelError("target set does not match the model");
}

/// Backward attractor: T plus states where (existential) some allowed action
/// or (universal) every action hits the set with positive probability.
/// Universal states with a disallowed action never join.
StateMask attractor(const StochasticGame& g, const Predecessors& pred, const StateMask& target,
                    const std::vector<std::uint8_t>& existential,
                    const std::vector<std::uint8_t>& action_ok) {
    const auto n = g.num_states();
    StateMask in(n, 0);
    std::vector<std::uint8_t> hit(g.num_actions(), 0);
    std::vector<std::uint32_t> count(n, 0);
    std::vector<std::uint8_t> blocked(n, 0);
    for (StateIndex s = 0; s < n; ++s)
        if (!existential[s])
            for (auto a = g.action_begin(s); a < g.action_end(s); ++a)
                if (!action_ok[a]) blocked[s] = 1;
    std::vector<StateIndex> queue;
    for (StateIndex s = 0; s < n; ++s)
        if (target[s]) {
            in[s] = 1;
            queue.push_back(s);
        }
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const StateIndex t = queue[i];
        for (auto p = pred.begin[t]; p < pred.begin[t + 1]; ++p) {
            const auto a = pred.action[p];
            const StateIndex s = pred.owner[a];
            if (in[s] || hit[a] || !action_ok[a]) continue;
            hit[a] = 1;
            ++count[s];
            const bool join = existential[s] ? true : (!blocked[s] && count[s] == g.action_count(s));
            if (join) {
                in[s] = 1;
                queue.push_back(s);
            }
        }
    }
    return in;
}

/// Jacobi sweeps of x[s] = opt_a (r[a] + sum p x[t]) on non-fixed states.
/// `maximize[s]` picks the optimization at s; `action_ok` filters actions.
struct Sweep {
    const StochasticGame& g;
    const std::vector<std::uint8_t>& fixed;
    const std::vector<std::uint8_t>& maximize;
    const std::vector<std::uint8_t>* action_ok = nullptr;
    const std::vector<double>* reward = nullptr;

    double q(std::uint32_t a, const std::vector<double>& x) const {
        double v = reward ? (*reward)[a] : 0.0;
        for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) v += g.probability(b) * x[g.target(b)];
        return v;
    }

    double value(StateIndex s, const std::vector<double>& x) const {
        bool any = false;
        double best = 0.0;
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            if (action_ok && !(*action_ok)[a]) continue;
            const double v = q(a, x);
            if (!any || (maximize[s] ? v > best : v < best)) best = v;
            any = true;
        }
        return any ? best : x[s];
    }

    /// One sweep; returns the sup-norm change.
    double step(const std::vector<double>& x, std::vector<double>& y) const {
        std::mutex mu;
        double diff = 0.0;
        parallel_for(g.num_states(), [&](std::size_t lo, std::size_t hi) {
            double local = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const auto s = static_cast<StateIndex>(i);
                y[s] = fixed[s] ? x[s] : value(s, x);
                if (!fixed[s]) {
                    const double d = std::abs(y[s] - x[s]);
                    if (d > local || std::isnan(d)) local = d;
                }
            }
            std::lock_guard lk(mu);
            diff = std::max(diff, local);
        });
        return diff;
    }

    /// Lowest-index action within kTieTolerance of the optimum.
    std::int32_t choose(StateIndex s, const std::vector<double>& x) const {
        const double best = value(s, x);
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            if (action_ok && !(*action_ok)[a]) continue;
            const double v = q(a, x);
            if (std::abs(v - best) <= kTieTolerance || v == best)
                return static_cast<std::int32_t>(a - g.action_begin(s));
        }
        return 0;
    }
};

Verdict iterate(const Sweep& sw, std::vector<double> x, const SolverConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw ModelError("epsilon must be positive");
    Verdict v;
    std::vector<double> y(x.size());
    v.converged = false;
    while (v.iterations < cfg.max_iterations) {
        const double diff = sw.step(x, y);
        x.swap(y);
        ++v.iterations;
        if (diff < cfg.epsilon) {
            v.converged = true;
            break;
        }
    }
    v.values = std::move(x);
    return v;
}

/// Scheduler for the maximizing states that makes progress toward the target
/// among value-optimal actions; minimizing states take the lowest-index optimum.
Scheduler progress_scheduler(const StochasticGame& g, const Predecessors& pred, const StateMask& target,
                             const std::vector<std::uint8_t>& maximize, const std::vector<double>& x,
                             const Sweep& sw) {
    const auto n = g.num_states();
    std::vector<std::uint8_t> optimal(g.num_actions(), 0);
    for (StateIndex s = 0; s < n; ++s) {
        const double best = sw.value(s, x);
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a)
            optimal[a] = std::abs(sw.q(a, x) - best) <= kTieTolerance;
    }
    Scheduler sch;
    sch.choice.assign(n, -1);
    for (StateIndex s = 0; s < n; ++s)
        if (!target[s] && !maximize[s]) sch.choice[s] = sw.choose(s, x);

    std::vector<std::uint8_t> ranked(n, 0);
    std::vector<StateIndex> layer;
    for (StateIndex s = 0; s < n; ++s)
        if (target[s]) {
            ranked[s] = 1;
            layer.push_back(s);
        }
    std::vector<std::uint8_t> touched(n, 0);
    while (!layer.empty()) {
        std::vector<StateIndex> cand;
        for (StateIndex t : layer)
            for (auto p = pred.begin[t]; p < pred.begin[t + 1]; ++p) {
                const StateIndex s = pred.owner[pred.action[p]];
                if (!ranked[s] && !touched[s] && x[s] > 0.0) {
                    touched[s] = 1;
                    cand.push_back(s);
                }
            }
        std::sort(cand.begin(), cand.end());
        std::vector<StateIndex> next;
        for (StateIndex s : cand) {
            touched[s] = 0;
            auto reaches = [&](std::uint32_t a) {
                for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                    if (ranked[g.target(b)]) return true;
                return false;
            };
            if (maximize[s]) {
                for (auto a = g.action_begin(s); a < g.action_end(s); ++a)
                    if (optimal[a] && reaches(a)) {
                        sch.choice[s] = static_cast<std::int32_t>(a - g.action_begin(s));
                        next.push_back(s);
                        break;
                    }
            } else {
                bool all = true;
                for (auto a = g.action_begin(s); a < g.action_end(s) && all; ++a)
                    if (optimal[a] && !reaches(a)) all = false;
                if (all) next.push_back(s);
            }
        }
        for (StateIndex s : next) ranked[s] = 1;
        layer.swap(next);
    }
    for (StateIndex s = 0; s < n; ++s)
        if (!target[s] && maximize[s] && sch.choice[s] < 0) sch.choice[s] = sw.choose(s, x);
    return sch;
}

Verdict solve_reach(const StochasticGame& g, const StateMask& target,
                    const std::vector<std::uint8_t>& maximize, const SolverConfig& cfg) {
    check_target(g, target);
    const auto n = g.num_states();
    const Predecessors pred(g);
    const std::vector<std::uint8_t> all_ok(g.num_actions(), 1);
    const StateMask positive = attractor(g, pred, target, maximize, all_ok);
    const StateMask one = qualitative_prob1(g, target, maximize);
    std::vector<std::uint8_t> fixed(n, 0);
    std::vector<double> x(n, 0.0);
    for (StateIndex s = 0; s < n; ++s) {
        if (target[s] || one[s]) {
            fixed[s] = 1;
            x[s] = 1.0;
        } else if (!positive[s]) {
            fixed[s] = 1;
        }
    }
    const Sweep sw{g, fixed, maximize};
    Verdict v = iterate(sw, std::move(x), cfg);
    v.scheduler = progress_scheduler(g, pred, target, maximize, v.values, sw);
    return v;
}

void strongly_connected(const StochasticGame& g, const StateMask& cand,
                        const std::vector<std::uint8_t>& act_ok, std::vector<std::int32_t>& comp) {
    const auto n = g.num_states();
    comp.assign(n, -1);
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<StateIndex> stack;
    struct Frame {
        StateIndex s;
        std::uint32_t a;
        std::uint32_t b;
    };
    std::vector<Frame> call;
    std::int32_t counter = 0, comps = 0;
    auto first_branch = [&](StateIndex s, std::uint32_t a, Frame& f) {
        for (; a < g.action_end(s); ++a)
            if (act_ok[a]) {
                f.a = a;
                f.b = g.branch_begin(a);
                return;
            }
        f.a = g.action_end(s);
        f.b = 0;
    };
    for (StateIndex root = 0; root < n; ++root) {
        if (!cand[root] || index[root] >= 0) continue;
        auto push = [&](StateIndex s) {
            index[s] = low[s] = counter++;
            stack.push_back(s);
            on_stack[s] = 1;
            Frame f{s, 0, 0};
            first_branch(s, g.action_begin(s), f);
            call.push_back(f);
        };
        push(root);
        while (!call.empty()) {
            Frame& f = call.back();
            const StateIndex s = f.s;
            if (f.a < g.action_end(s)) {
                if (f.b >= g.branch_end(f.a)) {
                    Frame nf = f;
                    first_branch(s, f.a + 1, nf);
                    f = nf;
                    continue;
                }
                const StateIndex t = g.target(f.b++);
                if (!cand[t]) continue;
                if (index[t] < 0) {
                    push(t);
                } else if (on_stack[t]) {
                    low[s] = std::min(low[s], index[t]);
                }
                continue;
            }
            if (low[s] == index[s]) {
                StateIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                } while (w != s);
                ++comps;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().s] = std::min(low[call.back().s], low[s]);
        }
    }
}

}  // namespace

StateMask qualitative_prob0(const StochasticGame& g, const StateMask& target,
                            const std::vector<std::uint8_t>& existential) {
    check_target(g, target);
    const Predecessors pred(g);
    const std::vector<std::uint8_t> all_ok(g.num_actions(), 1);
    return mask_not(attractor(g, pred, target, existential, all_ok));
}

StateMask qualitative_prob1(const StochasticGame& g, const StateMask& target,
                            const std::vector<std::uint8_t>& existential) {
    check_target(g, target);
    const Predecessors pred(g);
    const auto n = g.num_states();
    StateMask z(n, 1);
    std::vector<std::uint8_t> ok(g.num_actions());
    for (;;) {
        for (std::uint32_t a = 0; a < g.num_actions(); ++a) {
            bool inside = true;
            for (auto b = g.branch_begin(a); b < g.branch_end(a) && inside; ++b) inside = z[g.target(b)];
            ok[a] = inside;
        }
        StateMask y = attractor(g, pred, target, existential, ok);
        for (StateIndex s = 0; s < n; ++s) y[s] = y[s] && z[s];
        if (y == z) return z;
        z.swap(y);
    }
}

Verdict reach(const StochasticGame& m, const StateMask& target, Direction dir, const SolverConfig& cfg) {
    const std::vector<std::uint8_t> maximize(m.num_states(), dir == Direction::Max);
    return solve_reach(m, target, maximize, cfg);
}

Verdict sg_maxmin_reach(const StochasticGame& g, const StateMask& target, const SolverConfig& cfg) {
    std::vector<std::uint8_t> maximize(g.num_states());
    for (StateIndex s = 0; s < g.num_states(); ++s) maximize[s] = g.player(s) == Player::Circle;
    return solve_reach(g, target, maximize, cfg);
}

Verdict chain_reach(const MarkovChain& mc, const StateMask& target, const SolverConfig& cfg) {
    return reach(mc, target, Direction::Max, cfg);
}

Verdict bounded_reach(const StochasticGame& m, const StateMask& target, std::size_t k, Direction dir,
                      const SolverConfig&) {
    check_target(m, target);
    const auto n = m.num_states();
    const std::vector<std::uint8_t> maximize(n, dir == Direction::Max);
    std::vector<double> x(n, 0.0), y(n);
    for (StateIndex s = 0; s < n; ++s) x[s] = target[s] ? 1.0 : 0.0;
    const Sweep sw{m, target, maximize};
    Verdict v;
    v.scheduler.choice.assign(n, -1);
    for (std::size_t i = 0; i < k; ++i) {
        if (i + 1 == k)
            for (StateIndex s = 0; s < n; ++s)
                if (!target[s]) v.scheduler.choice[s] = sw.choose(s, x);
        sw.step(x, y);
        x.swap(y);
        ++v.iterations;
    }
    if (k == 0)
        for (StateIndex s = 0; s < n; ++s)
            if (!target[s]) v.scheduler.choice[s] = 0;
    v.values = std::move(x);
    return v;
}

std::vector<std::int32_t> maximal_end_components(const StochasticGame& g, const StateMask& allowed,
                                                 const std::vector<std::uint8_t>& allowed_action) {
    const auto n = g.num_states();
    StateMask cand = allowed;
    std::vector<std::uint8_t> ok = allowed_action;
    std::vector<std::int32_t> comp;
    for (;;) {
        // Trim actions leaving the candidate set, and states left without actions.
        for (bool changed = true; changed;) {
            changed = false;
            for (StateIndex s = 0; s < n; ++s) {
                if (!cand[s]) continue;
                bool any = false;
                for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
                    if (!ok[a]) continue;
                    for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                        if (!cand[g.target(b)]) {
                            ok[a] = 0;
                            break;
                        }
                    any = any || ok[a];
                }
                if (!any) {
                    cand[s] = 0;
                    changed = true;
                }
            }
        }
        strongly_connected(g, cand, ok, comp);
        bool split = false;
        for (StateIndex s = 0; s < n; ++s) {
            if (!cand[s]) continue;
            for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
                if (!ok[a]) continue;
                for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                    if (comp[g.target(b)] != comp[s]) {
                        ok[a] = 0;
                        split = true;
                        break;
                    }
            }
        }
        if (!split) break;
    }
    // Renumber by smallest member state.
    std::vector<std::int32_t> out(n, -1), remap;
    for (StateIndex s = 0; s < n; ++s) {
        if (!cand[s]) continue;
        const auto c = static_cast<std::size_t>(comp[s]);
        if (c >= remap.size()) remap.resize(c + 1, -1);
        if (remap[c] < 0) remap[c] = static_cast<std::int32_t>(std::count_if(remap.begin(), remap.end(), [](std::int32_t v) { return v >= 0; }));
        out[s] = remap[c];
    }
    return out;
}

namespace {

Verdict expected_max(const StochasticGame& g, const std::vector<double>& r, const StateMask& target,
                     const SolverConfig& cfg) {
    const auto n = g.num_states();
    const std::vector<std::uint8_t> universal(n, 0);
    const StateMask one = qualitative_prob1(g, target, universal);
    std::vector<std::uint8_t> fixed(n, 0);
    std::vector<double> x(n, 0.0);
    for (StateIndex s = 0; s < n; ++s) {
        if (target[s]) fixed[s] = 1;
        else if (!one[s]) {
            fixed[s] = 1;
            x[s] = kInfinity;
        }
    }
    const std::vector<std::uint8_t> maximize(n, 1);
    const Sweep sw{g, fixed, maximize, nullptr, &r};
    Verdict v = iterate(sw, std::move(x), cfg);
    v.scheduler.choice.assign(n, -1);
    for (StateIndex s = 0; s < n; ++s)
        if (!target[s]) v.scheduler.choice[s] = one[s] ? sw.choose(s, v.values) : 0;
    return v;
}

Verdict expected_min(const StochasticGame& g, const std::vector<double>& r, const StateMask& target,
                     const SolverConfig& cfg) {
    const auto n = g.num_states();
    const std::vector<std::uint8_t> existential(n, 1);
    const StateMask one = qualitative_prob1(g, target, existential);

    // Actions that keep almost-sure reachability possible.
    std::vector<std::uint8_t> stay(g.num_actions(), 0), zero(g.num_actions(), 0);
    StateMask region(n, 0);
    for (StateIndex s = 0; s < n; ++s) {
        if (target[s] || !one[s]) continue;
        region[s] = 1;
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            bool inside = true;
            for (auto b = g.branch_begin(a); b < g.branch_end(a) && inside; ++b) inside = one[g.target(b)];
            stay[a] = inside;
            zero[a] = inside && r[a] == 0.0;
        }
    }
    const std::vector<std::int32_t> mec = maximal_end_components(g, region, zero);
    std::int32_t mecs = 0;
    for (auto c : mec) mecs = std::max(mecs, c + 1);

    // Quotient: node per non-MEC region state, then one per MEC, then a target
    // sink and an infinity sink.
    std::vector<std::uint32_t> node(n, 0);
    std::vector<StateIndex> node_state;
    for (StateIndex s = 0; s < n; ++s)
        if (region[s] && mec[s] < 0) {
            node[s] = static_cast<std::uint32_t>(node_state.size());
            node_state.push_back(s);
        }
    const auto base = static_cast<std::uint32_t>(node_state.size());
    const std::uint32_t sink_t = base + static_cast<std::uint32_t>(mecs);
    for (StateIndex s = 0; s < n; ++s) {
        if (region[s] && mec[s] >= 0) node[s] = base + static_cast<std::uint32_t>(mec[s]);
        else if (!region[s]) node[s] = sink_t;
    }
    auto internal = [&](std::uint32_t a, StateIndex s) {
        if (mec[s] < 0 || !zero[a]) return false;
        for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
            if (mec[g.target(b)] != mec[s]) return false;
        return true;
    };
    std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(mecs));
    for (StateIndex s = 0; s < n; ++s)
        if (region[s] && mec[s] >= 0) members[static_cast<std::size_t>(mec[s])].push_back(s);

    GameBuilder qb;
    std::vector<std::uint32_t> qaction_origin;
    std::vector<double> qr;
    auto add_actions_of = [&](StateIndex s) {
        for (auto a = g.action_begin(s); a < g.action_end(s); ++a) {
            if (!stay[a] || internal(a, s)) continue;
            qb.add_named_action("q");
            qaction_origin.push_back(a);
            qr.push_back(r[a]);
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                qb.add_branch(node[g.target(b)], g.probability(b));
        }
    };
    for (std::uint32_t i = 0; i < base; ++i) {
        qb.add_state();
        add_actions_of(node_state[i]);
    }
    for (const auto& ms : members) {
        qb.add_state();
        for (StateIndex s : ms) add_actions_of(s);
    }
    qb.add_state();
    qb.add_named_action("q");
    qaction_origin.push_back(0);
    qr.push_back(0.0);
    qb.add_branch(sink_t, 1.0);
    const StochasticGame q = qb.finish();

    std::vector<std::uint8_t> qfixed(q.num_states(), 0);
    qfixed[sink_t] = 1;
    const std::vector<std::uint8_t> minimize(q.num_states(), 0);
    const Sweep sw{q, qfixed, minimize, nullptr, &qr};
    Verdict qv = iterate(sw, std::vector<double>(q.num_states(), 0.0), cfg);

    Verdict v;
    v.iterations = qv.iterations;
    v.converged = qv.converged;
    v.values.assign(n, 0.0);
    v.scheduler.choice.assign(n, -1);
    for (StateIndex s = 0; s < n; ++s) {
        if (target[s]) continue;
        if (!one[s]) {
            v.values[s] = kInfinity;
            v.scheduler.choice[s] = 0;
        } else {
            v.values[s] = qv.values[node[s]];
        }
    }
    for (std::uint32_t i = 0; i < base; ++i) {
        const auto qa = q.action_begin(i) + static_cast<std::uint32_t>(sw.choose(i, qv.values));
        const StateIndex s = node_state[i];
        v.scheduler.choice[s] = static_cast<std::int32_t>(qaction_origin[qa] - g.action_begin(s));
    }
    for (std::size_t c = 0; c < members.size(); ++c) {
        const auto qs = base + static_cast<std::uint32_t>(c);
        const auto qa = q.action_begin(qs) + static_cast<std::uint32_t>(sw.choose(qs, qv.values));
        const std::uint32_t a = qaction_origin[qa];
        StateIndex exit_state = 0;
        for (StateIndex s : members[c])
            if (a >= g.action_begin(s) && a < g.action_end(s)) exit_state = s;
        v.scheduler.choice[exit_state] = static_cast<std::int32_t>(a - g.action_begin(exit_state));
        // Route the other members to the exit inside the component.
        std::vector<std::uint8_t> done(n, 0);
        done[exit_state] = 1;
        for (bool progress = true; progress;) {
            progress = false;
            std::vector<StateIndex> joined;
            for (StateIndex s : members[c]) {
                if (done[s]) continue;
                for (auto b2 = g.action_begin(s); b2 < g.action_end(s); ++b2) {
                    if (!internal(b2, s)) continue;
                    bool hits = false;
                    for (auto br = g.branch_begin(b2); br < g.branch_end(b2) && !hits; ++br)
                        hits = done[g.target(br)];
                    if (hits) {
                        v.scheduler.choice[s] = static_cast<std::int32_t>(b2 - g.action_begin(s));
                        joined.push_back(s);
                        break;
                    }
                }
            }
            for (StateIndex s : joined) done[s] = 1;
            progress = !joined.empty();
        }
    }
    return v;
}

}  // namespace

Verdict expected_reward(const StochasticGame& m, const RewardFunction& rew, const StateMask& target,
                        Direction dir, const SolverConfig& cfg) {
    check_target(m, target);
    const StateActionReward r = as_state_action(m, rew);
    return dir == Direction::Max ? expected_max(m, r.values, target, cfg)
                                 : expected_min(m, r.values, target, cfg);
}

}  // namespace cogverify
