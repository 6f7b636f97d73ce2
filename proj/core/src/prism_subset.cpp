#include "cogverify/prism_subset.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>

namespace cogverify {

namespace {

struct Token {
    enum Kind { Ident, Number, String, Symbol, End } kind = End;
    std::string text;
    int line = 0;
    int column = 0;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    int line = 1;
    std::size_t line_start = 0;
    std::size_t i = 0;
    auto push = [&](Token::Kind k, std::size_t b, std::size_t e) {
        out.push_back({k, std::string(s.substr(b, e - b)), line, static_cast<int>(b - line_start + 1)});
    };
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\n') {
            ++line;
            line_start = ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        const std::size_t b = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            push(Token::Ident, b, i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
                ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            }
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
                if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    i = j;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                }
            }
            push(Token::Number, b, i);
        } else if (c == '"') {
            ++i;
            while (i < s.size() && s[i] != '"' && s[i] != '\n') ++i;
            if (i >= s.size() || s[i] != '"')
                throw InputError("unterminated string", line, static_cast<int>(b - line_start + 1));
            ++i;
            out.push_back({Token::String, std::string(s.substr(b + 1, i - b - 2)), line,
                           static_cast<int>(b - line_start + 1)});
        } else {
            static const char* two[] = {"->", "..", "!=", "<=", ">="};
            bool matched = false;
            for (const char* t : two)
                if (s.substr(i, 2) == t) {
                    i += 2;
                    push(Token::Symbol, b, i);
                    matched = true;
                    break;
                }
            if (!matched) {
                if (std::string_view("[]();:,'=<>&|!+-*/?").find(c) == std::string_view::npos)
                    throw InputError(std::string("unexpected character '") + c + "'", line,
                                     static_cast<int>(b - line_start + 1));
                ++i;
                push(Token::Symbol, b, i);
            }
        }
    }
    out.push_back({Token::End, "", line, static_cast<int>(i - line_start + 1)});
    return out;
}

struct Expr {
    enum Op { Num, Ident, Var, Not, And, Or, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Neg, Ite, Mod };
    Op op = Num;
    double value = 0.0;
    std::string name;
    int var = -1;
    std::vector<Expr> kids;
};

double eval(const Expr& e, const std::vector<int>& s) {
    switch (e.op) {
    case Expr::Num: return e.value;
    case Expr::Var: return s[static_cast<std::size_t>(e.var)];
    case Expr::Ident: throw ModelError("unresolved identifier " + e.name);
    case Expr::Not: return eval(e.kids[0], s) == 0.0 ? 1.0 : 0.0;
    case Expr::And:
        for (const auto& k : e.kids)
            if (eval(k, s) == 0.0) return 0.0;
        return 1.0;
    case Expr::Or:
        for (const auto& k : e.kids)
            if (eval(k, s) != 0.0) return 1.0;
        return 0.0;
    case Expr::Eq: return eval(e.kids[0], s) == eval(e.kids[1], s);
    case Expr::Ne: return eval(e.kids[0], s) != eval(e.kids[1], s);
    case Expr::Lt: return eval(e.kids[0], s) < eval(e.kids[1], s);
    case Expr::Le: return eval(e.kids[0], s) <= eval(e.kids[1], s);
    case Expr::Gt: return eval(e.kids[0], s) > eval(e.kids[1], s);
    case Expr::Ge: return eval(e.kids[0], s) >= eval(e.kids[1], s);
    case Expr::Add: return eval(e.kids[0], s) + eval(e.kids[1], s);
    case Expr::Sub: return eval(e.kids[0], s) - eval(e.kids[1], s);
    case Expr::Mul: return eval(e.kids[0], s) * eval(e.kids[1], s);
    case Expr::Div: return eval(e.kids[0], s) / eval(e.kids[1], s);
    case Expr::Neg: return -eval(e.kids[0], s);
    case Expr::Ite: return eval(e.kids[0], s) != 0.0 ? eval(e.kids[1], s) : eval(e.kids[2], s);
    case Expr::Mod: {
        const double a = eval(e.kids[0], s), b = eval(e.kids[1], s);
        if (b == 0.0) throw ModelError("mod by zero");
        const double r = std::fmod(a, b);
        return r < 0 ? r + std::abs(b) : r;
    }
    }
    return 0.0;
}

struct VarDecl {
    std::string name;
    int lo = 0, hi = 1;
    Expr init;
    int module = -1;  // -1 for globals
};

struct Update {
    Expr prob;
    std::vector<std::pair<int, Expr>> assign;
    std::vector<std::string> assign_names;
};

struct Command {
    int module = 0;
    std::string label;
    Expr guard;
    std::vector<Update> updates;
};

struct RewardItem {
    std::optional<std::string> label;  // set for action rewards
    Expr guard;
    Expr value;
};

struct Program {
    bool game = false;
    std::vector<VarDecl> vars;
    std::vector<std::string> modules;
    std::vector<Command> commands;
    std::map<std::string, Expr> constants, formulas;
    std::vector<std::pair<std::string, Expr>> labels;
    std::vector<std::pair<std::string, std::vector<RewardItem>>> rewards;
    std::vector<std::vector<std::string>> players;  // module names per player
};

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    Program program() {
        Program p;
        while (peek().kind != Token::End) {
            const Token& t = peek();
            if (t.kind != Token::Ident) fail("expected a declaration");
            if (t.text == "mdp" || t.text == "dtmc") {
                next();
            } else if (t.text == "smg") {
                p.game = true;
                next();
            } else if (t.text == "const") {
                next();
                if (peek().kind == Token::Ident && (peek().text == "int" || peek().text == "double" || peek().text == "bool"))
                    next();
                const std::string name = ident();
                expect("=");
                p.constants[name] = expr();
                expect(";");
            } else if (t.text == "formula") {
                next();
                const std::string name = ident();
                expect("=");
                p.formulas[name] = expr();
                expect(";");
            } else if (t.text == "global") {
                next();
                p.vars.push_back(decl(-1));
            } else if (t.text == "module") {
                next();
                const int m = static_cast<int>(p.modules.size());
                p.modules.push_back(ident());
                while (!(peek().kind == Token::Ident && peek().text == "endmodule")) {
                    if (peek().kind == Token::End) fail("missing endmodule");
                    if (peek().kind == Token::Symbol && peek().text == "[") p.commands.push_back(command(m));
                    else p.vars.push_back(decl(m));
                }
                next();
            } else if (t.text == "rewards") {
                next();
                if (peek().kind != Token::String) fail("expected a reward name");
                const std::string name = next().text;
                std::vector<RewardItem> items;
                while (!(peek().kind == Token::Ident && peek().text == "endrewards")) {
                    if (peek().kind == Token::End) fail("missing endrewards");
                    RewardItem it;
                    if (accept("[")) {
                        it.label = peek().kind == Token::Ident ? next().text : "";
                        expect("]");
                    }
                    it.guard = expr();
                    expect(":");
                    it.value = expr();
                    expect(";");
                    items.push_back(std::move(it));
                }
                next();
                p.rewards.emplace_back(name, std::move(items));
            } else if (t.text == "label") {
                next();
                if (peek().kind != Token::String) fail("expected a label name");
                const std::string name = next().text;
                expect("=");
                p.labels.emplace_back(name, expr());
                expect(";");
            } else if (t.text == "player") {
                next();
                ident();
                std::vector<std::string> mods;
                while (!(peek().kind == Token::Ident && peek().text == "endplayer")) {
                    if (peek().kind == Token::End) fail("missing endplayer");
                    if (accept(",")) continue;
                    mods.push_back(ident());
                }
                next();
                p.players.push_back(std::move(mods));
            } else {
                fail("unsupported construct '" + t.text + "'");
            }
        }
        return p;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("model text: " + msg, peek().line, peek().column);
    }
    bool is(std::string_view sym) const { return peek().kind == Token::Symbol && peek().text == sym; }
    bool accept(std::string_view sym) {
        if (!is(sym)) return false;
        ++pos_;
        return true;
    }
    void expect(std::string_view sym) {
        if (!accept(sym)) fail("expected '" + std::string(sym) + "'");
    }
    std::string ident() {
        if (peek().kind != Token::Ident) fail("expected an identifier");
        return next().text;
    }

    VarDecl decl(int module) {
        VarDecl v;
        v.module = module;
        v.name = ident();
        expect(":");
        if (peek().kind == Token::Ident && peek().text == "bool") {
            next();
            v.lo = 0;
            v.hi = 1;
        } else {
            expect("[");
            v.lo = static_cast<int>(std::lround(constant_value(expr())));
            expect("..");
            v.hi = static_cast<int>(std::lround(constant_value(expr())));
            expect("]");
        }
        if (!(peek().kind == Token::Ident && peek().text == "init")) fail("expected 'init'");
        next();
        v.init = expr();
        expect(";");
        return v;
    }

    static double constant_value(const Expr& e) {
        if (e.op == Expr::Num) return e.value;
        if (e.op == Expr::Neg && e.kids[0].op == Expr::Num) return -e.kids[0].value;
        throw InputError("variable bounds must be literals");
    }

    Command command(int module) {
        Command c;
        c.module = module;
        expect("[");
        if (peek().kind == Token::Ident) c.label = next().text;
        expect("]");
        c.guard = expr();
        expect("->");
        do {
            Update u;
            if (peek().kind == Token::Ident && peek().text == "true") {
                next();
                u.prob = Expr{Expr::Num, 1.0, {}, -1, {}};
            } else if (is("(") && toks_[pos_ + 1].kind == Token::Ident && toks_[pos_ + 2].text == "'") {
                u.prob = Expr{Expr::Num, 1.0, {}, -1, {}};
                assignments(u);
            } else {
                u.prob = additive();
                expect(":");
                if (peek().kind == Token::Ident && peek().text == "true") next();
                else assignments(u);
            }
            c.updates.push_back(std::move(u));
        } while (accept("+"));
        expect(";");
        return c;
    }

    void assignments(Update& u) {
        do {
            expect("(");
            const std::string name = ident();
            expect("'");
            expect("=");
            u.assign_names.push_back(name);
            u.assign.emplace_back(-1, expr());
            expect(")");
        } while (accept("&"));
    }

    Expr expr() {
        Expr c = disjunction();
        if (accept("?")) {
            Expr a = expr();
            expect(":");
            Expr b = expr();
            return Expr{Expr::Ite, 0, {}, -1, {std::move(c), std::move(a), std::move(b)}};
        }
        return c;
    }
    Expr disjunction() {
        Expr e = conjunction();
        if (!is("|")) return e;
        Expr o{Expr::Or, 0, {}, -1, {std::move(e)}};
        while (accept("|")) o.kids.push_back(conjunction());
        return o;
    }
    Expr conjunction() {
        Expr e = negation();
        if (!is("&")) return e;
        Expr o{Expr::And, 0, {}, -1, {std::move(e)}};
        while (accept("&")) o.kids.push_back(negation());
        return o;
    }
    Expr negation() {
        if (accept("!")) return Expr{Expr::Not, 0, {}, -1, {negation()}};
        return relation();
    }
    Expr relation() {
        Expr a = additive();
        static const std::pair<const char*, Expr::Op> ops[] = {{"=", Expr::Eq}, {"!=", Expr::Ne}, {"<", Expr::Lt},
                                                               {"<=", Expr::Le}, {">", Expr::Gt}, {">=", Expr::Ge}};
        for (const auto& [sym, op] : ops)
            if (accept(sym)) return Expr{op, 0, {}, -1, {std::move(a), additive()}};
        return a;
    }
    Expr additive() {
        Expr a = multiplicative();
        for (;;) {
            if (accept("+")) {
                // '+' also separates updates; a following probability is
                // recognized by the caller, so only fold plain terms here.
                a = Expr{Expr::Add, 0, {}, -1, {std::move(a), multiplicative()}};
            } else if (accept("-")) {
                a = Expr{Expr::Sub, 0, {}, -1, {std::move(a), multiplicative()}};
            } else {
                return a;
            }
        }
    }
    Expr multiplicative() {
        Expr a = unary();
        for (;;) {
            if (accept("*")) a = Expr{Expr::Mul, 0, {}, -1, {std::move(a), unary()}};
            else if (accept("/")) a = Expr{Expr::Div, 0, {}, -1, {std::move(a), unary()}};
            else return a;
        }
    }
    Expr unary() {
        if (accept("-")) return Expr{Expr::Neg, 0, {}, -1, {unary()}};
        if (accept("!")) return Expr{Expr::Not, 0, {}, -1, {unary()}};
        return primary();
    }
    Expr primary() {
        if (accept("(")) {
            Expr e = expr();
            expect(")");
            return e;
        }
        const Token& t = peek();
        if (t.kind == Token::Number) {
            next();
            return Expr{Expr::Num, std::strtod(t.text.c_str(), nullptr), {}, -1, {}};
        }
        if (t.kind == Token::Ident) {
            const std::string name = next().text;
            if (name == "true") return Expr{Expr::Num, 1.0, {}, -1, {}};
            if (name == "false") return Expr{Expr::Num, 0.0, {}, -1, {}};
            if (name == "mod" && accept("(")) {
                Expr a = expr();
                expect(",");
                Expr b = expr();
                expect(")");
                return Expr{Expr::Mod, 0, {}, -1, {std::move(a), std::move(b)}};
            }
            return Expr{Expr::Ident, 0, name, -1, {}};
        }
        fail("expected an expression");
    }
};

class Resolver {
public:
    explicit Resolver(const Program& p) : p_(p) {
        for (std::size_t i = 0; i < p.vars.size(); ++i) index_[p.vars[i].name] = static_cast<int>(i);
    }

    void resolve(Expr& e, int depth = 0) const {
        if (depth > 64) throw InputError("formula nesting too deep or cyclic");
        if (e.op == Expr::Ident) {
            if (auto it = index_.find(e.name); it != index_.end()) {
                e.op = Expr::Var;
                e.var = it->second;
            } else if (auto c = p_.constants.find(e.name); c != p_.constants.end()) {
                Expr v = c->second;
                resolve(v, depth + 1);
                e = std::move(v);
            } else if (auto f = p_.formulas.find(e.name); f != p_.formulas.end()) {
                Expr v = f->second;
                resolve(v, depth + 1);
                e = std::move(v);
            } else {
                throw InputError("unknown identifier '" + e.name + "'");
            }
            return;
        }
        for (auto& k : e.kids) resolve(k, depth);
    }

    int variable(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw InputError("unknown variable '" + name + "'");
        return it->second;
    }

private:
    const Program& p_;
    std::map<std::string, int> index_;
};

void flatten_and(const Expr& e, std::vector<const Expr*>& out) {
    if (e.op == Expr::And) {
        for (const auto& k : e.kids) flatten_and(k, out);
    } else {
        out.push_back(&e);
    }
}

}  // namespace

PrismExplored explore_prism(std::string_view text, std::size_t max_states) {
    Program p = Parser(text).program();
    const Resolver r(p);
    for (auto& v : p.vars) r.resolve(v.init);
    for (auto& c : p.commands) {
        r.resolve(c.guard);
        for (auto& u : c.updates) {
            r.resolve(u.prob);
            for (std::size_t i = 0; i < u.assign.size(); ++i) {
                u.assign[i].first = r.variable(u.assign_names[i]);
                r.resolve(u.assign[i].second);
            }
        }
    }
    for (auto& [name, e] : p.labels) r.resolve(e);
    for (auto& [name, items] : p.rewards)
        for (auto& it : items) {
            r.resolve(it.guard);
            r.resolve(it.value);
        }
    {
        std::map<std::string, int> label_module;
        for (const auto& c : p.commands) {
            if (c.label.empty()) continue;
            auto [it, fresh] = label_module.emplace(c.label, c.module);
            if (!fresh && it->second != c.module) throw InputError("synchronized command labels are not supported");
        }
    }
    std::vector<int> module_player(p.modules.size(), 1);
    for (std::size_t pl = 0; pl < p.players.size(); ++pl)
        for (const auto& name : p.players[pl]) {
            const auto it = std::find(p.modules.begin(), p.modules.end(), name);
            if (it == p.modules.end()) throw InputError("player lists unknown module '" + name + "'");
            module_player[static_cast<std::size_t>(it - p.modules.begin())] = static_cast<int>(pl);
        }

    // Index commands on the variables most guards pin to a constant.
    const std::size_t nv = p.vars.size();
    std::vector<std::vector<std::pair<int, int>>> pins(p.commands.size());
    std::vector<std::size_t> pin_count(nv, 0);
    for (std::size_t c = 0; c < p.commands.size(); ++c) {
        std::vector<const Expr*> atoms;
        flatten_and(p.commands[c].guard, atoms);
        for (const Expr* a : atoms)
            if (a->op == Expr::Eq && a->kids[0].op == Expr::Var && a->kids[1].op == Expr::Num) {
                pins[c].emplace_back(a->kids[0].var, static_cast<int>(a->kids[1].value));
                ++pin_count[static_cast<std::size_t>(a->kids[0].var)];
            }
    }
    std::vector<int> key_vars;
    for (std::size_t v = 0; v < nv; ++v)
        if (pin_count[v] * 2 >= p.commands.size() && !p.commands.empty()) key_vars.push_back(static_cast<int>(v));
    absl::flat_hash_map<std::vector<int>, std::vector<std::uint32_t>> by_key;
    std::vector<std::uint32_t> general;
    for (std::size_t c = 0; c < p.commands.size(); ++c) {
        std::vector<int> key;
        for (int v : key_vars) {
            const auto it = std::find_if(pins[c].begin(), pins[c].end(), [&](const auto& pr) { return pr.first == v; });
            if (it == pins[c].end()) break;
            key.push_back(it->second);
        }
        if (key.size() == key_vars.size()) by_key[key].push_back(static_cast<std::uint32_t>(c));
        else general.push_back(static_cast<std::uint32_t>(c));
    }

    PrismExplored out;
    out.is_game = p.game;
    for (const auto& v : p.vars) out.variables.push_back(v.name);
    std::vector<int> init(nv);
    for (std::size_t v = 0; v < nv; ++v) init[v] = static_cast<int>(std::lround(eval(p.vars[v].init, init)));

    absl::flat_hash_map<std::vector<int>, StateIndex> index;
    std::vector<std::vector<int>>& states = out.valuations;
    index.emplace(init, 0);
    states.push_back(init);
    GameBuilder b;
    std::vector<std::uint32_t> enabled;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::vector<int> s = states[i];
        enabled = general;
        std::vector<int> key;
        for (int v : key_vars) key.push_back(s[static_cast<std::size_t>(v)]);
        if (auto it = by_key.find(key); it != by_key.end())
            enabled.insert(enabled.end(), it->second.begin(), it->second.end());
        std::sort(enabled.begin(), enabled.end());
        enabled.erase(std::remove_if(enabled.begin(), enabled.end(),
                                     [&](std::uint32_t c) { return eval(p.commands[c].guard, s) == 0.0; }),
                      enabled.end());
        if (enabled.empty())
            throw ModelError("deadlock in state " + std::to_string(i) + " of the exported model");
        int player = -1;
        for (auto c : enabled) {
            const int pl = module_player[static_cast<std::size_t>(p.commands[c].module)];
            if (player >= 0 && pl != player && p.game) throw ModelError("two players enabled in one state");
            player = pl;
        }
        b.add_state(p.game && player != 0 ? Player::Box : Player::Circle);
        for (auto c : enabled) {
            const Command& cmd = p.commands[c];
            b.add_named_action("prism");
            out.action_command.push_back(c);
            double sum = 0.0;
            for (const auto& u : cmd.updates) {
                const double pr = eval(u.prob, s);
                if (!(pr >= 0.0)) throw ModelError("negative probability in the exported model");
                sum += pr;
                std::vector<int> t = s;
                for (const auto& [v, e] : u.assign) {
                    const int val = static_cast<int>(std::lround(eval(e, s)));
                    const auto& d = p.vars[static_cast<std::size_t>(v)];
                    if (val < d.lo || val > d.hi) throw ModelError("update leaves the range of " + d.name);
                    t[static_cast<std::size_t>(v)] = val;
                }
                auto [it, fresh] = index.try_emplace(t, static_cast<StateIndex>(states.size()));
                if (fresh) {
                    if (states.size() >= max_states) throw ModelError("exported model exceeds the state limit");
                    states.push_back(std::move(t));
                }
                b.add_branch(it->second, pr);
            }
            if (std::abs(sum - 1.0) > 1e-9) throw ModelError("distribution does not sum to 1 in the exported model");
        }
    }
    b.set_initial(0);
    out.game = b.finish();

    const auto n = states.size();
    for (const auto& [name, e] : p.labels) {
        std::vector<std::uint8_t> mask(n);
        for (std::size_t s = 0; s < n; ++s) mask[s] = eval(e, states[s]) != 0.0;
        out.game.set_atom(name, std::move(mask));
    }
    for (const auto& [name, items] : p.rewards) {
        StateActionReward rew;
        rew.values.assign(out.game.num_actions(), 0.0);
        for (StateIndex s = 0; s < n; ++s) {
            double state_part = 0.0;
            for (const auto& it : items)
                if (!it.label && eval(it.guard, states[s]) != 0.0) state_part += eval(it.value, states[s]);
            for (auto a = out.game.action_begin(s); a < out.game.action_end(s); ++a) {
                double v = state_part;
                const std::string& lbl = p.commands[out.action_command[a]].label;
                for (const auto& it : items)
                    if (it.label && !it.label->empty() && *it.label == lbl && eval(it.guard, states[s]) != 0.0)
                        v += eval(it.value, states[s]);
                rew.values[a] = v;
            }
        }
        out.rewards[name] = std::move(rew);
    }
    return out;
}

}  // namespace cogverify
