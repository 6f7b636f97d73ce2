#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "cogverify/builder.hpp"
#include "cogverify/checker.hpp"
#include "cogverify/model_io.hpp"
#include "cogverify/prism_export.hpp"
#include "cogverify/prism_subset.hpp"
#include "cogverify/property.hpp"
#include "cogverify/simulation.hpp"
#include "cogverify/sweep.hpp"

namespace cogverify::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
    std::string scenario;
    std::string qtables;
    std::optional<double> temperature;
    std::string variant = "underspec";
    std::string deadlock = "block";
    std::string mode;
    double epsilon = 1e-6;
    std::size_t max_iters = 1'000'000;
    std::string output = "text";
    std::string out;

    std::string property;
    bool gate = false;
    bool coalition = false;
    bool game = false;
    std::string export_prism;
    std::string explicit_path;
    std::string policy;
    std::string scheduler = "none";
    std::string scheduler_out;
    std::uint64_t seed = 1;
    std::size_t samples = 10'000;
    std::size_t horizon = 40;
    std::size_t trajectories = 0;
    std::string trajectories_out;
    std::string taus;
    std::string steps = "inf";
    bool no_formulas = false;
    bool long_names = false;
    bool no_collapse = false;
    std::string rewards;
    bool human_only = false;
    bool verify = false;
};

/// What a subcommand hands back for rendering.
struct Report {
    Json doc;
    std::vector<std::string> header;  // table form for csv; empty means key,value
    std::vector<std::vector<std::string>> rows;
    int status = kOk;
};

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json num(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

HumanVariant parse_variant(const std::string& s) {
    if (s == "underspec") return HumanVariant::Underspecified;
    if (s == "lowconf") return HumanVariant::LowConfidence;
    if (s == "unique") return HumanVariant::UniqueClosest;
    throw InputError("--variant must be underspec, lowconf or unique");
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') throw InputError(std::string("malformed number in ") + what + ": " + item);
        out.push_back(v);
    }
    if (out.empty()) throw InputError(std::string(what) + " is empty");
    return out;
}

std::size_t parse_count(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InputError(std::string("malformed count in ") + what + ": " + s);
    return static_cast<std::size_t>(std::stoull(s));
}

/// "10,20,inf" or "10:60:10" (inclusive range), possibly mixed.
std::vector<std::optional<std::size_t>> parse_steps(const std::string& s) {
    std::vector<std::optional<std::size_t>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "inf") {
            out.emplace_back();
            continue;
        }
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.emplace_back(parse_count(item, "--steps"));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        const std::size_t lo = parse_count(item.substr(0, c1), "--steps");
        const std::size_t hi = parse_count(item.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1), "--steps");
        const std::size_t step = c2 == std::string::npos ? 1 : parse_count(item.substr(c2 + 1), "--steps");
        if (step == 0) throw InputError("--steps range needs a positive stride");
        for (std::size_t k = lo; k <= hi; k += step) out.emplace_back(k);
    }
    if (out.empty()) throw InputError("--steps is empty");
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

class Session {
public:
    explicit Session(const Options& o) : o_(o) {}

    ScenarioSpec scenario() const {
        if (o_.scenario.empty()) throw InputError("--scenario is required");
        ScenarioSpec spec = load_scenario(o_.scenario);
        if (!o_.mode.empty()) {
            if (!spec.robot) throw InputError("--mode needs a robot in the scenario");
            if (o_.mode == "ignored") spec.robot->mode = RobotMode::Ignored;
            else if (o_.mode == "obstacle") spec.robot->mode = RobotMode::ObstacleFeature;
            else throw InputError("--mode must be ignored or obstacle");
        }
        return spec;
    }

    QTableSet qtables() const {
        if (o_.qtables.empty()) throw InputError("--qtables is required");
        return load_qtables(o_.qtables);
    }

    HumanModelConfig config() const {
        HumanModelConfig c;
        c.variant = parse_variant(o_.variant);
        c.temperature = o_.temperature;
        if (o_.deadlock == "block") c.deadlock = DeadlockPolicy::Block;
        else if (o_.deadlock == "fall") c.deadlock = DeadlockPolicy::Fall;
        else throw InputError("--deadlock must be block or fall");
        return c;
    }

    SolverConfig solver() const {
        if (!(o_.epsilon > 0.0)) throw InputError("--epsilon must be positive");
        return {o_.epsilon, o_.max_iters};
    }

    static Json model_summary(const BuiltModel& m) {
        const auto& g = m.game;
        std::size_t choice = 0, widest = 0;
        for (StateIndex s = 0; s < g.num_states(); ++s) {
            choice += g.action_count(s) > 1;
            widest = std::max<std::size_t>(widest, g.action_count(s));
        }
        Json j;
        j["kind"] = g.is_mdp() ? "mdp" : "game";
        j["states"] = g.num_states();
        j["actions"] = g.num_actions();
        j["branches"] = g.num_branches();
        j["choice_states"] = choice;
        j["max_actions"] = widest;
        j["variant"] = std::string(to_string(m.config.variant));
        j["deadlock"] = std::string(to_string(m.config.deadlock));
        return j;
    }

    static std::string scheduler_listing(const BuiltModel& m, const Scheduler& sch, bool circle_only) {
        std::string out;
        for (StateIndex s = 0; s < m.game.num_states(); ++s) {
            const auto c = sch.choice[s];
            if (c < 0) continue;
            if (circle_only && m.game.player(s) != Player::Circle) continue;
            out += m.describe_state(s) + " -> " + m.describe_action(m.game.action_begin(s) + static_cast<std::uint32_t>(c)) + "\n";
        }
        return out;
    }

    void maybe_export(const ScenarioSpec& spec, const QTableSet& q, Json& doc) const {
        if (o_.export_prism.empty()) return;
        const PrismExport e = spec.robot && !o_.human_only ? export_sg(spec, q, *spec.robot, config(), encoding())
                                                           : export_human(spec, q, config(), encoding());
        write_file(o_.export_prism, e.text);
        doc["export"] = stats_json(e.stats);
    }

    EncodingOptions encoding() const {
        EncodingOptions e;
        e.use_named_formulas = !o_.no_formulas;
        e.short_variable_names = !o_.long_names;
        e.collapse_far_bins = !o_.no_collapse;
        if (o_.rewards == "rescaled") e.reward_encoding = RewardEncoding::Rescaled;
        else if (o_.rewards == "first_time") e.reward_encoding = RewardEncoding::FirstTimeFlag;
        else if (o_.rewards == "none") e.include_rewards = false;
        else if (!o_.rewards.empty()) throw InputError("--rewards must be rescaled, first_time or none");
        return e;
    }

    static Json stats_json(const EncodingStats& s) {
        Json j;
        j["commands"] = s.commands;
        j["lines"] = s.lines;
        j["bytes"] = s.bytes;
        j["variables"] = s.variables;
        j["positions"] = s.positions;
        j["triple_commands"] = s.triple_commands;
        j["exhausted_commands"] = s.exhausted_commands;
        j["other_commands"] = s.other_commands;
        j["max_triple_commands"] = s.max_triple_commands;
        j["bound"] = s.bound;
        j["within_bound"] = s.within_bound();
        return j;
    }

    Report validate() const {
        const ScenarioSpec spec = scenario();
        Report r;
        r.doc["command"] = "validate";
        r.doc["ok"] = true;
        r.doc["grid"] = {spec.env.grid.width, spec.env.grid.height};
        r.doc["obstacles"] = spec.env.count(FeatureType::Obstacle);
        r.doc["litter"] = spec.env.count(FeatureType::Litter);
        r.doc["waypoints"] = spec.env.count(FeatureType::Waypoint);
        r.doc["robot"] = spec.robot.has_value();
        if (!o_.qtables.empty()) {
            const QTableSet q = qtables();
            r.doc["angle_sign"] = q.angle_sign() == AngleSign::LeftPositive ? "left_positive" : "right_positive";
            r.doc["low_confidence_cells"] = q.has_low_confidence();
        }
        return r;
    }

    Report build() const {
        const ScenarioSpec spec = scenario();
        const QTableSet q = qtables();
        const bool game = o_.game;
        if (game && !spec.robot) throw InputError("no robot in scenario");
        const BuiltModel m = game ? compose_sg(spec, q, config()) : build_human_mdp(spec, q, config());
        Report r;
        r.doc["command"] = "build";
        r.doc["model"] = model_summary(m);
        Json labels = Json::object();
        for (const auto& [name, mask] : m.game.atoms())
            labels[name] = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
        r.doc["labels"] = labels;
        if (!o_.explicit_path.empty()) {
            std::vector<std::optional<HumanPosition>> locs(m.game.num_states());
            for (StateIndex s = 0; s < m.game.num_states(); ++s)
                if (!m.is_stuck(s)) locs[s] = m.situation(s).pos;
            write_file(o_.explicit_path, write_explicit(m.game, locs));
        }
        maybe_export(spec, q, r.doc);
        return r;
    }

    Report check() const {
        if (o_.property.empty()) throw InputError("--property is required");
        const auto props = parse_properties(o_.property);
        const ScenarioSpec spec = scenario();
        const QTableSet q = qtables();
        const BuiltModel m = build_human_mdp(spec, q, config());
        const SolverConfig sc = solver();
        Report r;
        r.doc["command"] = "check";
        r.doc["model"] = model_summary(m);
        r.header = {"property", "min", "max", "gap", "value", "satisfied", "iterations", "converged"};
        Json results = Json::array();
        std::size_t violated = 0;
        bool converged = true;
        // Both directions come out of one evaluation, so Pmin/Pmax pairs share it.
        std::map<std::string, PropertyResult> done;
        for (std::size_t i = 0; i < props.size(); ++i) {
            const Property& p = props[i];
            const std::string key = std::to_string(static_cast<int>(p.kind)) + "|" +
                                    (p.step_bound ? std::to_string(*p.step_bound) : "inf") + "|" + p.reward + "|" +
                                    p.target.to_string();
            auto it = done.find(key);
            if (it == done.end()) it = done.emplace(key, evaluate_property(m, p, sc)).first;
            PropertyResult pr = it->second;
            pr.property = p;
            pr.value = p.dir == Direction::Min ? pr.min : pr.max;
            pr.satisfied = p.cmp ? std::optional<bool>(compare(pr.value, *p.cmp, p.threshold)) : std::nullopt;
            Json j;
            j["property"] = pr.property.text;
            j["min"] = num(pr.min);
            j["max"] = num(pr.max);
            j["gap"] = num(pr.gap);
            j["value"] = num(pr.value);
            j["satisfied"] = pr.satisfied ? Json(*pr.satisfied) : Json(nullptr);
            j["iterations"] = pr.iterations;
            j["converged"] = pr.converged;
            results.push_back(j);
            r.rows.push_back({pr.property.text, fmt(pr.min), fmt(pr.max), fmt(pr.gap), fmt(pr.value),
                              pr.satisfied ? (*pr.satisfied ? "true" : "false") : "", std::to_string(pr.iterations),
                              pr.converged ? "true" : "false"});
            if (pr.satisfied && !*pr.satisfied) ++violated;
            converged = converged && pr.converged;
            if (i == 0 && !o_.scheduler_out.empty())
                write_file(o_.scheduler_out, scheduler_listing(m, pr.verdict.scheduler, false));
        }
        r.doc["results"] = results;
        r.doc["violated"] = violated;
        r.doc["gated"] = o_.gate;
        maybe_export(spec, q, r.doc);
        if (!converged) r.status = kInternalError;
        else if (o_.gate && violated > 0) r.status = kGateViolation;
        return r;
    }

    Report synthesize() const {
        const ScenarioSpec spec = scenario();
        if (!spec.robot) throw InputError("no robot in scenario");
        const QTableSet q = qtables();
        const Property p = parse_property(o_.property.empty() ? "Pmax(F robot_goal)" : o_.property);
        if (p.kind != Property::Kind::Probability || p.step_bound)
            throw InputError("synthesize needs an unbounded probability property");
        const BuiltModel sg = compose_sg(spec, q, config());
        const BuiltModel m = o_.coalition ? coalition_mdp(sg) : sg;
        const StateMask target = p.target.evaluate(m.game);
        const SolverConfig sc = solver();
        const Verdict v = o_.coalition ? reach(m.game, target, Direction::Max, sc) : sg_maxmin_reach(m.game, target, sc);
        Scheduler both = v.scheduler;
        for (auto& c : both.choice) c = std::max(c, 0);
        const MarkovChain mc = induced_chain(m.game, both);
        const double replay = chain_reach(mc, target, sc).at(mc.initial());
        const double value = v.at(m.game.initial());
        Report r;
        r.doc["command"] = "synthesize";
        r.doc["model"] = model_summary(m);
        r.doc["coalition"] = o_.coalition;
        r.doc["property"] = p.text;
        r.doc["value"] = value;
        r.doc["replay"] = replay;
        r.doc["iterations"] = v.iterations;
        r.doc["converged"] = v.converged;
        if (!o_.policy.empty()) {
            char head[64];
            std::snprintf(head, sizeof head, "value %.17g\n", value);
            // Coalition decisions at human states are kept since the robot controls them too.
            write_file(o_.policy, head + scheduler_listing(m, v.scheduler, !o_.coalition));
            r.doc["policy"] = o_.policy;
        }
        if (!v.converged) r.status = kInternalError;
        return r;
    }

    Report export_model() const {
        if (o_.export_prism.empty()) throw InputError("--export-prism is required");
        const ScenarioSpec spec = scenario();
        const QTableSet q = qtables();
        const bool game = spec.robot && !o_.human_only;
        const PrismExport e = game ? export_sg(spec, q, *spec.robot, config(), encoding())
                                   : export_human(spec, q, config(), encoding());
        write_file(o_.export_prism, e.text);
        Report r;
        r.doc["command"] = "export";
        r.doc["model"] = game ? "game" : "mdp";
        r.doc["path"] = o_.export_prism;
        r.doc["stats"] = stats_json(e.stats);
        if (o_.verify) {
            const PrismExplored x = explore_prism(e.text);
            Json v;
            v["states"] = x.game.num_states();
            v["actions"] = x.game.num_actions();
            // The builder's count for the same encoding.
            const BuiltModel m = game ? first_time_flags(compose_sg(spec, q, config())).model
                                      : build_human_mdp(spec, q, config());
            v["builder_states"] = m.game.num_states();
            r.doc["verify"] = v;
        }
        if (!e.stats.within_bound()) r.status = kInternalError;
        return r;
    }

    Report simulate() const {
        const ScenarioSpec spec = scenario();
        const QTableSet q = qtables();
        const BuiltModel m = build_human_mdp(spec, q, config());
        const Property p = parse_property(o_.property.empty() ? "Pmax(F goal)" : o_.property);
        const StateMask target = p.target.evaluate(m.game);
        Scheduler sch;
        if (o_.scheduler == "none") {
            for (StateIndex s = 0; s < m.game.num_states(); ++s)
                if (m.game.action_count(s) > 1)
                    throw InputError("unresolved nondeterminism at " + m.describe_state(s) +
                                     "; pass --scheduler max|min or --variant unique");
            sch.choice.assign(m.game.num_states(), 0);
        } else if (o_.scheduler == "max" || o_.scheduler == "min") {
            sch = reach(m.game, target, o_.scheduler == "max" ? Direction::Max : Direction::Min, solver()).scheduler;
            for (auto& c : sch.choice) c = std::max(c, 0);
        } else {
            throw InputError("--scheduler must be none, max or min");
        }
        const MarkovChain mc = induced_chain(m.game, sch);
        const Estimate e = monte_carlo(mc, target, o_.samples, o_.horizon, o_.seed);
        const double exact = bounded_reach(mc, target, o_.horizon, Direction::Max, solver()).at(mc.initial());
        Report r;
        r.doc["command"] = "simulate";
        r.doc["model"] = model_summary(m);
        r.doc["target"] = p.target.to_string();
        r.doc["scheduler"] = o_.scheduler;
        r.doc["samples"] = e.samples;
        r.doc["hits"] = e.hits;
        r.doc["horizon"] = e.horizon;
        r.doc["seed"] = e.seed;
        r.doc["estimate"] = e.estimate;
        r.doc["lo"] = e.lo;
        r.doc["hi"] = e.hi;
        r.doc["checker"] = exact;
        r.doc["within"] = e.lo <= exact && exact <= e.hi;
        if (o_.trajectories > 0) {
            const auto paths = sample_paths(mc, target, o_.trajectories, o_.horizon, o_.seed);
            std::string text;
            for (const auto& path : paths) {
                for (std::size_t i = 0; i < path.size(); ++i) text += (i ? " > " : "") + m.describe_state(path[i]);
                text += "\n";
            }
            if (o_.trajectories_out.empty()) throw InputError("--trajectories needs --trajectories-out");
            write_file(o_.trajectories_out, text);
        }
        return r;
    }

    Report sweep() const {
        if (o_.taus.empty()) throw InputError("--taus is required");
        const ScenarioSpec spec = scenario();
        const QTableSet q = qtables();
        const Property p = parse_property(o_.property.empty() ? "Pmax(F goal)" : o_.property);
        const auto rows = temperature_sweep(spec, q, p.target, parse_doubles(o_.taus, "--taus"), parse_steps(o_.steps),
                                            config(), solver());
        Report r;
        r.doc["command"] = "sweep";
        r.doc["target"] = p.target.to_string();
        r.header = {"tau", "k", "pmin", "pmax"};
        Json arr = Json::array();
        for (const auto& row : rows) {
            Json j;
            j["tau"] = row.tau;
            j["k"] = row.k ? Json(*row.k) : Json("inf");
            j["pmin"] = row.pmin;
            j["pmax"] = row.pmax;
            arr.push_back(j);
            r.rows.push_back({fmt(row.tau), row.k ? std::to_string(*row.k) : "inf", fmt(row.pmin), fmt(row.pmax)});
        }
        r.doc["rows"] = arr;
        return r;
    }

private:
    const Options& o_;
};

std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

void render_text(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (auto it = j.begin(); it != j.end(); ++it) {
        const Json& v = it.value();
        if (v.is_object()) {
            out += pad + it.key() + ":\n";
            render_text(v, out, indent + 2);
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            out += pad + it.key() + ":\n";
            for (const auto& e : v) {
                std::string inner;
                render_text(e, inner, indent + 2);
                inner.replace(static_cast<std::size_t>(indent), 2, "- ");
                out += inner;
            }
        } else if (v.is_array()) {
            std::string items;
            for (const auto& e : v) items += (items.empty() ? "" : ", ") + scalar_text(e);
            out += pad + it.key() + ": " + items + "\n";
        } else {
            out += pad + it.key() + ": " + scalar_text(v) + "\n";
        }
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string render(const Report& r, const std::string& format) {
    if (format == "json") return r.doc.dump(2) + "\n";
    if (format == "csv") {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
            out += "\n";
        };
        if (!r.header.empty()) {
            line(r.header);
            for (const auto& row : r.rows) line(row);
        } else {
            line({"key", "value"});
            for (auto it = r.doc.begin(); it != r.doc.end(); ++it)
                if (it.value().is_object()) {
                    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
                        if (!jt.value().is_structured()) line({it.key() + "." + jt.key(), scalar_text(jt.value())});
                } else if (!it.value().is_structured()) {
                    line({it.key(), scalar_text(it.value())});
                }
        }
        return out;
    }
    std::string out;
    render_text(r.doc, out, 0);
    return out;
}

void add_common(CLI::App* c, Options& o) {
    c->add_option("--scenario", o.scenario, "Scenario file");
    c->add_option("--qtables", o.qtables, "Q-table file");
    c->add_option("--temperature", o.temperature, "Softmax temperature (overrides the scenario)");
    c->add_option("--variant", o.variant, "underspec, lowconf or unique")->capture_default_str();
    c->add_option("--deadlock", o.deadlock, "block or fall")->capture_default_str();
    c->add_option("--mode", o.mode, "Robot mode: ignored or obstacle");
    c->add_option("--epsilon", o.epsilon, "Value iteration tolerance")->capture_default_str();
    c->add_option("--max-iters", o.max_iters, "Value iteration limit")->capture_default_str();
    c->add_option("--output", o.output, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}))->capture_default_str();
    c->add_option("--out", o.out, "Write the report here instead of stdout");
}

void add_encoding(CLI::App* c, Options& o) {
    c->add_option("--export-prism", o.export_prism, "Write the guarded-command encoding here");
    c->add_flag("--no-formulas", o.no_formulas, "Inline position predicates");
    c->add_flag("--long-names", o.long_names, "Descriptive variable names");
    c->add_flag("--no-collapse", o.no_collapse, "One command per feature triple");
    c->add_option("--rewards", o.rewards, "rescaled, first_time or none");
    c->add_flag("--human-only", o.human_only, "Export only the human module");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Verification of human-robot grid scenarios", "cogverify"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "Check scenario and q-table files");
    add_common(validate, o);

    auto* build = app.add_subcommand("build", "Build the human MDP (or the game with --game)");
    add_common(build, o);
    add_encoding(build, o);
    build->add_flag("--game", o.game, "Compose with the robot");
    build->add_option("--explicit", o.explicit_path, "Write the explicit model here");

    auto* check = app.add_subcommand("check", "Evaluate properties on the human MDP");
    add_common(check, o);
    add_encoding(check, o);
    check->add_option("--property", o.property, "e.g. \"Pmax(F goal); Pmin<=0.1(F<=20 stuck)\"");
    check->add_flag("--gate", o.gate, "Exit 3 when a bounded property fails");
    check->add_option("--scheduler-out", o.scheduler_out, "Write the first property's scheduler here");

    auto* synth = app.add_subcommand("synthesize", "Robot policy against the human");
    add_common(synth, o);
    synth->add_option("--property", o.property, "Unbounded probability property")->capture_default_str();
    synth->add_flag("--coalition", o.coalition, "Let the robot resolve the human's nondeterminism");
    synth->add_option("--policy", o.policy, "Write the policy listing here");

    auto* exp = app.add_subcommand("export", "Write the guarded-command encoding");
    add_common(exp, o);
    add_encoding(exp, o);
    exp->add_flag("--verify", o.verify, "Re-explore the text and report its state count");

    auto* sim = app.add_subcommand("simulate", "Sample trajectories of the resolved model");
    add_common(sim, o);
    sim->add_option("--property", o.property, "Target of the estimate");
    sim->add_option("--scheduler", o.scheduler, "none, max or min")->capture_default_str();
    sim->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sim->add_option("--samples", o.samples, "Number of trajectories")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--horizon", o.horizon, "Steps per trajectory")->capture_default_str();
    sim->add_option("--trajectories", o.trajectories, "Dump this many trajectories");
    sim->add_option("--trajectories-out", o.trajectories_out, "Trajectory dump path");

    auto* sweep = app.add_subcommand("sweep", "Pmin/Pmax over temperatures and step bounds");
    add_common(sweep, o);
    sweep->add_option("--property", o.property, "Target of the sweep");
    sweep->add_option("--taus", o.taus, "Comma-separated temperatures");
    sweep->add_option("--steps", o.steps, "Comma-separated bounds, ranges a:b:step, inf")->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (app.get_subcommands().empty()) err << app.help();
        return kInputError;
    }

    try {
        const Session s(o);
        Report r;
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "validate") r = s.validate();
        else if (name == "build") r = s.build();
        else if (name == "check") r = s.check();
        else if (name == "synthesize") r = s.synthesize();
        else if (name == "export") r = s.export_model();
        else if (name == "simulate") r = s.simulate();
        else r = s.sweep();
        const std::string text = render(r, o.output);
        if (o.out.empty()) out << text;
        else write_file(o.out, text);
        return r.status;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ValidationError& e) {
        err << "invalid input:\n";
        for (const auto& issue : e.issues()) err << "  " << issue << "\n";
        return kInputError;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return kInternalError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

}  // namespace cogverify::cli
