#include "cogverify/sweep.hpp"

#include <cstdio>

namespace cogverify {

std::vector<SweepRow> temperature_sweep(const ScenarioSpec& spec, const QTableSet& q, const LabelExpr& target,
                                        const std::vector<double>& taus,
                                        const std::vector<std::optional<std::size_t>>& bounds,
                                        HumanModelConfig cfg, const SolverConfig& solver) {
    std::vector<SweepRow> rows;
    for (double tau : taus) {
        cfg.temperature = tau;
        const BuiltModel m = build_human_mdp(spec, q, cfg);
        const StateMask t = target.evaluate(m.game);
        const StateIndex s0 = m.game.initial();
        for (const auto& k : bounds) {
            SweepRow row{tau, k, 0.0, 0.0};
            if (k) {
                row.pmin = bounded_reach(m.game, t, *k, Direction::Min, solver).at(s0);
                row.pmax = bounded_reach(m.game, t, *k, Direction::Max, solver).at(s0);
            } else {
                row.pmin = reach(m.game, t, Direction::Min, solver).at(s0);
                row.pmax = reach(m.game, t, Direction::Max, solver).at(s0);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "tau,k,pmin,pmax\n";
    char buf[128];
    for (const auto& r : rows) {
        const std::string k = r.k ? std::to_string(*r.k) : "inf";
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", r.tau, k.c_str(), r.pmin, r.pmax);
        out += buf;
    }
    return out;
}

}  // namespace cogverify
