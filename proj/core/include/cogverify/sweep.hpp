#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"
#include "cogverify/property.hpp"

namespace cogverify {

struct SweepRow {
    double tau = 0.0;
    std::optional<std::size_t> k;  // nullopt = unbounded
    double pmin = 0.0;
    double pmax = 0.0;
};

/// Rebuilds the human MDP for every temperature and evaluates min/max reach
/// of `target` for every step bound (nullopt entries mean unbounded). Rows
/// are ordered by tau, then by bound.
std::vector<SweepRow> temperature_sweep(const ScenarioSpec& spec, const QTableSet& q, const LabelExpr& target,
                                        const std::vector<double>& taus,
                                        const std::vector<std::optional<std::size_t>>& bounds,
                                        HumanModelConfig cfg = {}, const SolverConfig& solver = {});

/// "tau,k,pmin,pmax" header plus one line per row; unbounded rows print k as inf.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace cogverify
