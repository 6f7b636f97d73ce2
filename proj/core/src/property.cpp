#include "cogverify/property.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace cogverify {

std::string_view to_string(Comparison c) {
    switch (c) {
    case Comparison::Less: return "<";
    case Comparison::LessEqual: return "<=";
    case Comparison::Greater: return ">";
    case Comparison::GreaterEqual: return ">=";
    }
    return "?";
}

bool compare(double value, Comparison c, double threshold) {
    switch (c) {
    case Comparison::Less: return value < threshold;
    case Comparison::LessEqual: return value <= threshold;
    case Comparison::Greater: return value > threshold;
    case Comparison::GreaterEqual: return value >= threshold;
    }
    return false;
}

StateMask LabelExpr::evaluate(const StochasticGame& g) const {
    const auto n = g.num_states();
    switch (op) {
    case Op::True: return StateMask(n, 1);
    case Op::False: return StateMask(n, 0);
    case Op::Label:
        if (!g.has_atom(name)) throw InputError("unknown label '" + name + "'");
        return g.atom(name);
    case Op::Not: return mask_not(args[0].evaluate(g));
    case Op::And: {
        StateMask m = args[0].evaluate(g);
        for (std::size_t i = 1; i < args.size(); ++i) m = mask_and(m, args[i].evaluate(g));
        return m;
    }
    case Op::Or: {
        StateMask m = args[0].evaluate(g);
        for (std::size_t i = 1; i < args.size(); ++i) m = mask_or(m, args[i].evaluate(g));
        return m;
    }
    }
    return StateMask(n, 0);
}

namespace {

int precedence(LabelExpr::Op op) {
    switch (op) {
    case LabelExpr::Op::Or: return 0;
    case LabelExpr::Op::And: return 1;
    default: return 2;
    }
}

}  // namespace

std::string LabelExpr::to_string() const {
    auto sub = [&](const LabelExpr& e) {
        return precedence(e.op) <= precedence(op) ? "(" + e.to_string() + ")" : e.to_string();
    };
    switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Label: return name;
    case Op::Not: return "!" + (precedence(args[0].op) < 2 ? "(" + args[0].to_string() + ")" : args[0].to_string());
    case Op::And:
    case Op::Or: {
        std::string s;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) s += op == Op::And ? " & " : " | ";
            s += sub(args[i]);
        }
        return s;
    }
    }
    return "";
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : t_(text) {}

    Property property() {
        Property p;
        skip();
        const std::size_t start = pos_;
        const std::string kind = word();
        if (kind == "Pmin" || kind == "Pmax") p.kind = Property::Kind::Probability;
        else if (kind == "Emin" || kind == "Emax") p.kind = Property::Kind::Reward;
        else fail("expected Pmin, Pmax, Emin or Emax", start);
        p.dir = kind.substr(1) == "min" ? Direction::Min : Direction::Max;
        skip();
        if (peek() == '[') {
            const std::size_t at = pos_;
            ++pos_;
            skip();
            p.reward = word();
            if (p.kind != Property::Kind::Reward) fail("reward names apply to Emin/Emax only", at);
            if (p.reward != "collect" && p.reward != "avoid" && p.reward != "follow" && p.reward != "steps")
                fail("unknown reward '" + p.reward + "' (expected collect, avoid, follow or steps)", at + 1);
            expect(']');
        }
        skip();
        if (auto c = comparison()) {
            p.cmp = c;
            skip();
            const std::size_t at = pos_;
            p.threshold = number();
            if (p.kind == Property::Kind::Probability && (p.threshold < 0.0 || p.threshold > 1.0))
                fail("probability bound must lie in [0,1]", at);
            if (p.threshold < 0.0) fail("reward bound must be nonnegative", at);
        }
        expect('(');
        skip();
        const std::size_t f_at = pos_;
        if (word() != "F") fail("expected 'F'", f_at);
        skip();
        if (peek() == '<' && pos_ + 1 < t_.size() && t_[pos_ + 1] == '=') {
            pos_ += 2;
            skip();
            const std::size_t at = pos_;
            p.step_bound = integer();
            if (p.kind == Property::Kind::Reward) fail("step-bounded reward queries are not supported", at);
        }
        p.target = expr();
        expect(')');
        p.text = format(p);
        return p;
    }

    bool at_end() {
        skip();
        return pos_ >= t_.size();
    }
    bool consume(char c) {
        skip();
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) { fail(msg, pos_); }

private:
    std::string_view t_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) {
        throw InputError("property: " + msg + " at column " + std::to_string(at + 1), 1,
                         static_cast<int>(at + 1));
    }
    char peek() const { return pos_ < t_.size() ? t_[pos_] : '\0'; }
    void skip() {
        while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
    }
    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    std::string word() {
        const std::size_t b = pos_;
        while (pos_ < t_.size() &&
               (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '_'))
            ++pos_;
        return std::string(t_.substr(b, pos_ - b));
    }
    std::optional<Comparison> comparison() {
        if (peek() == '<' || peek() == '>') {
            const bool less = peek() == '<';
            ++pos_;
            if (peek() == '=') {
                ++pos_;
                return less ? Comparison::LessEqual : Comparison::GreaterEqual;
            }
            return less ? Comparison::Less : Comparison::Greater;
        }
        return std::nullopt;
    }
    double number() {
        const std::size_t b = pos_;
        while (pos_ < t_.size() && (std::isdigit(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '.' ||
                                    t_[pos_] == 'e' || t_[pos_] == 'E' || t_[pos_] == '-' || t_[pos_] == '+'))
            ++pos_;
        const std::string s(t_.substr(b, pos_ - b));
        char* end = nullptr;
        const double v = s.empty() ? 0.0 : std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) fail("expected a number", b);
        return v;
    }
    std::size_t integer() {
        const std::size_t b = pos_;
        while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
        std::size_t v = 0;
        const auto r = std::from_chars(t_.data() + b, t_.data() + pos_, v);
        if (b == pos_ || r.ec != std::errc()) fail("expected a step count", b);
        return v;
    }

    LabelExpr expr() {
        LabelExpr first = conj();
        if (!peek_op('|')) return first;
        LabelExpr e{LabelExpr::Op::Or, {}, {std::move(first)}};
        while (consume('|')) e.args.push_back(conj());
        return e;
    }
    LabelExpr conj() {
        LabelExpr first = unary();
        if (!peek_op('&')) return first;
        LabelExpr e{LabelExpr::Op::And, {}, {std::move(first)}};
        while (consume('&')) e.args.push_back(unary());
        return e;
    }
    bool peek_op(char c) {
        skip();
        return peek() == c;
    }
    LabelExpr unary() {
        skip();
        if (consume('!')) return LabelExpr{LabelExpr::Op::Not, {}, {unary()}};
        skip();
        if (peek() == '(') {
            ++pos_;
            LabelExpr e = expr();
            expect(')');
            return e;
        }
        const std::size_t at = pos_;
        if (!(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) fail("expected a label", at);
        std::string w = word();
        if (w == "true") return LabelExpr{LabelExpr::Op::True, {}, {}};
        if (w == "false") return LabelExpr{LabelExpr::Op::False, {}, {}};
        return LabelExpr{LabelExpr::Op::Label, std::move(w), {}};
    }

    static std::string format(const Property& p) {
        std::string s = p.kind == Property::Kind::Probability ? "P" : "E";
        s += p.dir == Direction::Min ? "min" : "max";
        if (p.kind == Property::Kind::Reward) s += "[" + p.reward + "]";
        if (p.cmp) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", p.threshold);
            s += std::string(to_string(*p.cmp)) + buf;
        }
        s += "(F";
        if (p.step_bound) s += "<=" + std::to_string(*p.step_bound);
        s += " " + p.target.to_string() + ")";
        return s;
    }
};

}  // namespace

Property parse_property(std::string_view text) {
    Parser ps(text);
    Property p = ps.property();
    if (!ps.at_end()) ps.fail("unexpected trailing text");
    return p;
}

std::vector<Property> parse_properties(std::string_view text) {
    Parser ps(text);
    std::vector<Property> out;
    if (ps.at_end()) ps.fail("empty property list");
    for (;;) {
        out.push_back(ps.property());
        if (ps.at_end()) break;
        if (!ps.consume(';')) ps.fail("expected ';' between properties");
        if (ps.at_end()) break;
    }
    return out;
}

RewardFunction named_reward(const BuiltModel& m, const std::string& name) {
    if (name == "steps") return StateReward{std::vector<double>(m.game.num_states(), 1.0)};
    const auto o = parse_objective(name);
    if (!o) throw InputError("unknown reward '" + name + "'");
    return objective_reward(m, *o);
}

PropertyResult evaluate_property(const BuiltModel& m, const Property& p, const SolverConfig& cfg) {
    const StateMask target = p.target.evaluate(m.game);
    PropertyResult r;
    r.property = p;
    Verdict lo, hi;
    if (p.kind == Property::Kind::Probability) {
        if (p.step_bound) {
            lo = bounded_reach(m.game, target, *p.step_bound, Direction::Min, cfg);
            hi = bounded_reach(m.game, target, *p.step_bound, Direction::Max, cfg);
        } else {
            lo = reach(m.game, target, Direction::Min, cfg);
            hi = reach(m.game, target, Direction::Max, cfg);
        }
    } else {
        const RewardFunction rew = named_reward(m, p.reward);
        lo = expected_reward(m.game, rew, target, Direction::Min, cfg);
        hi = expected_reward(m.game, rew, target, Direction::Max, cfg);
    }
    const StateIndex s0 = m.game.initial();
    r.min = lo.at(s0);
    r.max = hi.at(s0);
    r.gap = (r.min == kInfinity && r.max == kInfinity) ? 0.0 : r.max - r.min;
    r.iterations = lo.iterations + hi.iterations;
    r.converged = lo.converged && hi.converged;
    r.verdict = p.dir == Direction::Min ? std::move(lo) : std::move(hi);
    r.value = p.dir == Direction::Min ? r.min : r.max;
    if (p.cmp) r.satisfied = compare(r.value, *p.cmp, p.threshold);
    return r;
}

}  // namespace cogverify
