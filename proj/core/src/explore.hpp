#pragma once

// Level-synchronous forward exploration shared by the model builders.
// Private to the core library.

#include <absl/container/flat_hash_map.h>

#include <string>
#include <utility>
#include <vector>

#include "cogverify/model.hpp"
#include "cogverify/parallel.hpp"

namespace cogverify::detail {

template <typename Key>
struct Successor {
    ActionLabel label;
    std::string name;  // used when label.kind == Named
    std::vector<std::pair<Key, double>> branches;
};

template <typename Key>
struct Explored {
    StochasticGame game;
    std::vector<Key> keys;
};

/// Expands every frontier state in parallel, then assigns indices to new
/// successors sequentially in (state, action, branch) order. The numbering is
/// therefore breadth-first and independent of the worker count.
///
/// expand(const Key&, std::vector<Successor<Key>>&) fills the actions;
/// player(const Key&) gives the owner.
template <typename Key, typename Expand, typename PlayerOf>
Explored<Key> explore(const Key& init, Expand&& expand, PlayerOf&& player,
                      std::size_t max_states = 200'000'000) {
    Explored<Key> out;
    absl::flat_hash_map<Key, StateIndex> index;
    index.emplace(init, 0);
    out.keys.push_back(init);
    GameBuilder b;
    std::size_t begin = 0;
    std::vector<std::vector<Successor<Key>>> succ;
    while (begin < out.keys.size()) {
        const std::size_t end = out.keys.size();
        succ.clear();
        succ.resize(end - begin);
        parallel_for(end - begin, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) expand(out.keys[begin + i], succ[i]);
        }, 256);
        for (std::size_t i = begin; i < end; ++i) {
            b.add_state(player(out.keys[i]));
            for (auto& act : succ[i - begin]) {
                if (act.label.kind == ActionKind::Named) b.add_named_action(act.name);
                else b.add_action(act.label);
                for (const auto& [k, p] : act.branches) {
                    if (p == 0.0) continue;
                    auto [it, inserted] = index.try_emplace(k, static_cast<StateIndex>(out.keys.size()));
                    if (inserted) {
                        if (out.keys.size() >= max_states)
                            throw ModelError("state space exceeds " + std::to_string(max_states) + " states");
                        out.keys.push_back(k);
                    }
                    b.add_branch(it->second, p);
                }
            }
            succ[i - begin].clear();
            succ[i - begin].shrink_to_fit();
        }
        begin = end;
    }
    b.set_initial(0);
    out.game = b.finish();
    return out;
}

}  // namespace cogverify::detail
