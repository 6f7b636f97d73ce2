#include "cogverify/brute_force.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <limits>

namespace cogverify {

namespace {

/// Non-target states with a real choice (C) are kept symbolic; everything else
/// is eliminated once up front. For t outside C and T:
///   H(t, c) = probability that the first visit to C ∪ T is c,
///   h(t)    = probability that it is T,
///   g(t)    = expected reward collected before it.
/// Positivity comes from graph bitsets so that the qualitative structure of
/// each induced chain is exact.
struct Reduction {
    const StochasticGame& g;
    const StateMask& target;
    std::vector<StateIndex> choice;        // the C states
    std::vector<std::int32_t> choice_pos;  // state -> position in C, or -1
    std::vector<std::uint64_t> reach_c;    // bitset over C (single-action states)
    std::vector<std::uint8_t> reach_t;
    std::vector<std::uint8_t> bad;         // C ∪ T missed with positive probability
    Eigen::MatrixXd hit_c;                 // rows: states, cols: C
    Eigen::VectorXd hit_t;
    Eigen::VectorXd gain;

    Reduction(const StochasticGame& game, const StateMask& t, const std::vector<std::uint8_t>& is_choice,
              const std::vector<double>* reward)
        : g(game), target(t) {
        const auto n = g.num_states();
        choice_pos.assign(n, -1);
        for (StateIndex s = 0; s < n; ++s)
            if (is_choice[s]) {
                choice_pos[s] = static_cast<std::int32_t>(choice.size());
                choice.push_back(s);
            }
        if (choice.size() > 64) throw ModelError("too many choice states for enumeration");
        auto eliminated = [&](StateIndex s) { return !target[s] && choice_pos[s] < 0; };

        reach_c.assign(n, 0);
        reach_t.assign(n, 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (StateIndex s = 0; s < n; ++s) {
                if (!eliminated(s)) continue;
                const auto a = g.action_begin(s);
                std::uint64_t c = reach_c[s];
                std::uint8_t tt = reach_t[s];
                for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) {
                    const StateIndex u = g.target(b);
                    if (target[u]) tt = 1;
                    else if (choice_pos[u] >= 0) c |= std::uint64_t{1} << choice_pos[u];
                    else {
                        c |= reach_c[u];
                        tt |= reach_t[u];
                    }
                }
                if (c != reach_c[s] || tt != reach_t[s]) {
                    reach_c[s] = c;
                    reach_t[s] = tt;
                    changed = true;
                }
            }
        }
        // bad: can reach, through eliminated states, an eliminated state that
        // never leaves the eliminated region.
        bad.assign(n, 0);
        for (StateIndex s = 0; s < n; ++s)
            if (eliminated(s) && reach_c[s] == 0 && !reach_t[s]) bad[s] = 1;
        for (bool changed = true; changed;) {
            changed = false;
            for (StateIndex s = 0; s < n; ++s) {
                if (!eliminated(s) || bad[s]) continue;
                const auto a = g.action_begin(s);
                for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b)
                    if (bad[g.target(b)]) {
                        bad[s] = 1;
                        changed = true;
                        break;
                    }
            }
        }

        // Linear solve over eliminated states that can leave the region.
        std::vector<std::int32_t> row(n, -1);
        std::vector<StateIndex> rows;
        for (StateIndex s = 0; s < n; ++s)
            if (eliminated(s) && (reach_c[s] != 0 || reach_t[s])) {
                row[s] = static_cast<std::int32_t>(rows.size());
                rows.push_back(s);
            }
        const auto m = static_cast<Eigen::Index>(rows.size());
        const auto k = static_cast<Eigen::Index>(choice.size());
        hit_c = Eigen::MatrixXd::Zero(n, k);
        hit_t = Eigen::VectorXd::Zero(n);
        gain = Eigen::VectorXd::Zero(n);
        if (m == 0) return;
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, k + 2);
        for (Eigen::Index i = 0; i < m; ++i) {
            const StateIndex s = rows[static_cast<std::size_t>(i)];
            const auto a = g.action_begin(s);
            trip.emplace_back(i, i, 1.0);
            if (reward) rhs(i, k + 1) = (*reward)[a];
            for (auto b = g.branch_begin(a); b < g.branch_end(a); ++b) {
                const StateIndex u = g.target(b);
                const double p = g.probability(b);
                if (target[u]) rhs(i, k) += p;
                else if (choice_pos[u] >= 0) rhs(i, choice_pos[u]) += p;
                else if (row[u] >= 0) trip.emplace_back(i, row[u], -p);
            }
        }
        Eigen::SparseMatrix<double> a(m, m);
        a.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw ModelError("oracle elimination failed");
        const Eigen::MatrixXd x = lu.solve(rhs);
        for (Eigen::Index i = 0; i < m; ++i) {
            const StateIndex s = rows[static_cast<std::size_t>(i)];
            hit_c.row(s) = x.row(i).head(k);
            hit_t(s) = x(i, k);
            gain(s) = x(i, k + 1);
        }
    }

    /// Reach probabilities (or expected rewards) of the chain where choice
    /// state i plays local action pick[i].
    std::vector<double> evaluate(const std::vector<std::uint32_t>& pick, const std::vector<double>* reward) const {
        const auto n = g.num_states();
        const auto k = choice.size();
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
        std::vector<std::uint64_t> succ(k, 0);
        std::vector<std::uint8_t> to_t(k, 0), to_bad(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            const StateIndex s = choice[i];
            const auto act = g.action_begin(s) + pick[i];
            if (reward) rhs(static_cast<Eigen::Index>(i)) = (*reward)[act];
            for (auto b = g.branch_begin(act); b < g.branch_end(act); ++b) {
                const StateIndex u = g.target(b);
                const double p = g.probability(b);
                if (target[u]) {
                    to_t[i] = 1;
                    if (!reward) rhs(static_cast<Eigen::Index>(i)) += p;
                } else if (choice_pos[u] >= 0) {
                    succ[i] |= std::uint64_t{1} << choice_pos[u];
                    a(static_cast<Eigen::Index>(i), choice_pos[u]) += p;
                } else {
                    succ[i] |= reach_c[u];
                    to_t[i] |= reach_t[u];
                    to_bad[i] |= bad[u];
                    a.row(static_cast<Eigen::Index>(i)) += p * hit_c.row(u);
                    rhs(static_cast<Eigen::Index>(i)) += p * (reward ? gain(u) : hit_t(u));
                }
            }
        }
        // can_t: reaches T with positive probability.
        std::uint64_t can_t = 0;
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < k; ++i)
                if (!(can_t >> i & 1) && (to_t[i] || (succ[i] & can_t))) {
                    can_t |= std::uint64_t{1} << i;
                    changed = true;
                }
        }
        // solvable: for reach, can_t; for rewards, reaches T almost surely.
        std::uint64_t solvable = can_t;
        if (reward) {
            std::uint64_t lost = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (!(can_t >> i & 1) || to_bad[i]) lost |= std::uint64_t{1} << i;
            for (bool changed = true; changed;) {
                changed = false;
                for (std::size_t i = 0; i < k; ++i)
                    if (!(lost >> i & 1) && (succ[i] & lost)) {
                        lost |= std::uint64_t{1} << i;
                        changed = true;
                    }
            }
            solvable = ~lost;
        }
        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < k; ++i)
            if (solvable >> i & 1) idx.push_back(static_cast<Eigen::Index>(i));
        const double unsolved = reward ? kInfinity : 0.0;
        std::vector<double> vc(k, unsolved);
        if (!idx.empty()) {
            const auto m = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXd sys(m, m);
            Eigen::VectorXd r(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                r(i) = rhs(idx[static_cast<std::size_t>(i)]);
                for (Eigen::Index j = 0; j < m; ++j)
                    sys(i, j) = (i == j ? 1.0 : 0.0) - a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            }
            const Eigen::VectorXd x = sys.partialPivLu().solve(r);
            for (Eigen::Index i = 0; i < m; ++i) vc[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = x(i);
        }

        std::vector<double> v(n, 0.0);
        for (StateIndex s = 0; s < n; ++s) {
            if (target[s]) {
                v[s] = reward ? 0.0 : 1.0;
            } else if (choice_pos[s] >= 0) {
                v[s] = vc[static_cast<std::size_t>(choice_pos[s])];
            } else if (reward && bad[s]) {
                v[s] = kInfinity;
            } else {
                double x = reward ? gain(s) : hit_t(s);
                for (std::size_t c = 0; c < k; ++c) {
                    if (!(reach_c[s] >> c & 1)) continue;
                    if (vc[c] == kInfinity) {
                        x = kInfinity;
                        break;
                    }
                    x += hit_c(s, static_cast<Eigen::Index>(c)) * vc[c];
                }
                v[s] = x;
            }
        }
        return v;
    }
};

std::vector<std::uint8_t> choice_states(const StochasticGame& g, const StateMask& target) {
    std::vector<std::uint8_t> c(g.num_states(), 0);
    for (StateIndex s = 0; s < g.num_states(); ++s) c[s] = !target[s] && g.action_count(s) > 1;
    return c;
}

void check_target(const StochasticGame& g, const StateMask& target) {
    if (target.size() != g.num_states()) throw ModelError("target set does not match the model");
}

/// Calls fn(pick) for every combination of local actions over `states`.
template <typename Fn>
void enumerate(const StochasticGame& g, const std::vector<StateIndex>& states, Fn&& fn) {
    std::vector<std::uint32_t> pick(states.size(), 0);
    for (;;) {
        fn(pick);
        std::size_t i = 0;
        for (; i < states.size(); ++i) {
            if (++pick[i] < g.action_count(states[i])) break;
            pick[i] = 0;
        }
        if (i == states.size()) return;
    }
}

OracleValues optimize(const StochasticGame& m, const StateMask& target, const std::vector<double>* reward,
                      const OracleConfig& cfg) {
    check_target(m, target);
    const std::size_t count = scheduler_count(m, target);
    if (count > cfg.cap) throw ModelError("scheduler enumeration exceeds cap");
    const Reduction red(m, target, choice_states(m, target), reward);
    OracleValues out;
    out.min.assign(m.num_states(), kInfinity);
    out.max.assign(m.num_states(), -kInfinity);
    enumerate(m, red.choice, [&](const std::vector<std::uint32_t>& pick) {
        const auto v = red.evaluate(pick, reward);
        for (std::size_t s = 0; s < v.size(); ++s) {
            out.min[s] = std::min(out.min[s], v[s]);
            out.max[s] = std::max(out.max[s], v[s]);
        }
        ++out.schedulers;
    });
    return out;
}

}  // namespace

std::size_t scheduler_count(const StochasticGame& g, const StateMask& target) {
    std::size_t total = 1;
    for (StateIndex s = 0; s < g.num_states(); ++s) {
        if (target[s]) continue;
        const std::size_t c = g.action_count(s);
        if (c > 1 && total > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
        total *= std::max<std::size_t>(c, 1);
    }
    return total;
}

OracleValues brute_force_reach(const StochasticGame& m, const StateMask& target, const OracleConfig& cfg) {
    return optimize(m, target, nullptr, cfg);
}

OracleValues brute_force_reward(const StochasticGame& m, const RewardFunction& rew, const StateMask& target,
                                const OracleConfig& cfg) {
    const StateActionReward r = as_state_action(m, rew);
    return optimize(m, target, &r.values, cfg);
}

OracleValues brute_force_bounded_reach(const StochasticGame& m, const StateMask& target, std::size_t k,
                                       const OracleConfig& cfg) {
    check_target(m, target);
    std::size_t nodes = 0;
    // Explicit stack of (state, steps left) frames; each frame folds its
    // children's values into the per-action sums.
    struct Frame {
        StateIndex s;
        std::size_t left;
        std::uint32_t a;
        std::uint32_t b;
        double sum;
        double best;
        bool any;
    };
    auto solve = [&](StateIndex root, bool maximize) {
        std::vector<Frame> st;
        double ret = 0.0;
        auto open = [&](StateIndex s, std::size_t left) -> bool {
            if (++nodes > cfg.node_cap) throw ModelError("bounded oracle exceeds node cap");
            if (target[s]) {
                ret = 1.0;
                return false;
            }
            if (left == 0) {
                ret = 0.0;
                return false;
            }
            st.push_back({s, left, m.action_begin(s), m.branch_begin(m.action_begin(s)), 0.0, 0.0, false});
            return true;
        };
        if (!open(root, k)) return ret;
        bool returning = false;
        while (!st.empty()) {
            Frame& f = st.back();
            if (returning) {
                f.sum += m.probability(f.b) * ret;
                ++f.b;
                returning = false;
            }
            if (f.b < m.branch_end(f.a)) {
                const StateIndex u = m.target(f.b);
                const std::size_t left = f.left - 1;
                if (!open(u, left)) returning = true;
                continue;
            }
            if (!f.any || (maximize ? f.sum > f.best : f.sum < f.best)) f.best = f.sum;
            f.any = true;
            ++f.a;
            if (f.a < m.action_end(f.s)) {
                f.b = m.branch_begin(f.a);
                f.sum = 0.0;
                continue;
            }
            ret = f.best;
            st.pop_back();
            returning = true;
        }
        return ret;
    };
    OracleValues out;
    out.min.resize(m.num_states());
    out.max.resize(m.num_states());
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        out.min[s] = solve(s, false);
        out.max[s] = solve(s, true);
    }
    out.schedulers = nodes;
    return out;
}

GameOracle brute_force_sg_maxmin(const StochasticGame& g, const StateMask& target, const OracleConfig& cfg) {
    check_target(g, target);
    if (scheduler_count(g, target) > cfg.cap) throw ModelError("scheduler enumeration exceeds cap");
    const Reduction red(g, target, choice_states(g, target), nullptr);
    std::vector<StateIndex> circle, box;
    std::vector<std::size_t> circle_pos, box_pos;
    for (std::size_t i = 0; i < red.choice.size(); ++i) {
        if (g.player(red.choice[i]) == Player::Circle) {
            circle.push_back(red.choice[i]);
            circle_pos.push_back(i);
        } else {
            box.push_back(red.choice[i]);
            box_pos.push_back(i);
        }
    }
    GameOracle out;
    out.maxmin.assign(g.num_states(), -kInfinity);
    std::vector<std::uint32_t> pick(red.choice.size(), 0);
    enumerate(g, circle, [&](const std::vector<std::uint32_t>& cp) {
        for (std::size_t i = 0; i < cp.size(); ++i) pick[circle_pos[i]] = cp[i];
        std::vector<double> worst(g.num_states(), kInfinity);
        enumerate(g, box, [&](const std::vector<std::uint32_t>& bp) {
            for (std::size_t i = 0; i < bp.size(); ++i) pick[box_pos[i]] = bp[i];
            const auto v = red.evaluate(pick, nullptr);
            for (std::size_t s = 0; s < v.size(); ++s) worst[s] = std::min(worst[s], v[s]);
            ++out.pairs;
        });
        for (std::size_t s = 0; s < worst.size(); ++s) out.maxmin[s] = std::max(out.maxmin[s], worst[s]);
    });
    return out;
}

StochasticGame keep_first_action(const StochasticGame& g, const StateMask& keep) {
    GameBuilder b(g.num_states());
    for (StateIndex s = 0; s < g.num_states(); ++s) {
        b.add_state(g.player(s));
        const auto end = keep[s] ? g.action_end(s) : g.action_begin(s) + 1;
        for (auto a = g.action_begin(s); a < end; ++a) {
            const ActionLabel& l = g.label(a);
            if (l.kind == ActionKind::Named) b.add_named_action(g.names()[static_cast<std::size_t>(l.a)]);
            else b.add_action(l);
            for (auto br = g.branch_begin(a); br < g.branch_end(a); ++br) b.add_branch(g.target(br), g.probability(br));
        }
    }
    b.set_initial(g.initial());
    StochasticGame out = b.finish();
    for (const auto& [name, mask] : g.atoms()) out.set_atom(name, mask);
    return out;
}

}  // namespace cogverify
