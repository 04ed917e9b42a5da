#include "igl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <mutex>
#include <tuple>
#include <unordered_map>

namespace igl {

namespace {

struct Key {
    Op op;
    std::string name;
    Formula a, b;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = std::hash<std::string>{}(k.name);
        h ^= std::hash<const void*>{}(k.a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<const void*>{}(k.b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h * 31 + static_cast<std::size_t>(k.op);
    }
};

struct Pool {
    std::mutex mu;
    std::unordered_map<Key, std::unique_ptr<Node>, KeyHash> table;
};

Pool& pool() {
    static Pool p;
    return p;
}

Formula make(Op op, std::string name, Formula a, Formula b) {
    Pool& p = pool();
    Key k{op, std::move(name), a, b};
    std::lock_guard<std::mutex> lock(p.mu);
    auto it = p.table.find(k);
    if (it != p.table.end()) return it->second.get();
    auto n = std::make_unique<Node>();
    n->op = op;
    n->name = k.name;
    n->a = a;
    n->b = b;
    n->size = 1 + (a ? a->size : 0) + (b ? b->size : 0);
    int d = std::max(a ? a->modal_depth : 0, b ? b->modal_depth : 0);
    n->modal_depth = (op == Op::Box || op == Op::Dia) ? d + 1 : d;
    Formula out = n.get();
    p.table.emplace(std::move(k), std::move(n));
    return out;
}

}  // namespace

Formula atom(const std::string& name) { return make(Op::Atom, name, nullptr, nullptr); }
Formula bot() { return make(Op::Bot, "", nullptr, nullptr); }
Formula conj(Formula a, Formula b) { return make(Op::And, "", a, b); }
Formula disj(Formula a, Formula b) { return make(Op::Or, "", a, b); }
Formula imp(Formula a, Formula b) { return make(Op::Imp, "", a, b); }
Formula box(Formula a) { return make(Op::Box, "", a, nullptr); }
Formula dia(Formula a) { return make(Op::Dia, "", a, nullptr); }

int compare(Formula x, Formula y) {
    if (x == y) return 0;
    if (x->op != y->op) return x->op < y->op ? -1 : 1;
    if (x->op == Op::Atom) return x->name < y->name ? -1 : 1;
    if (x->a) {
        int c = compare(x->a, y->a);
        if (c) return c;
    }
    if (x->b) return compare(x->b, y->b);
    return 0;
}

ParseError::ParseError(std::size_t off, std::vector<std::string> exp, const std::string& found)
    : std::runtime_error([&] {
          std::string m = "syntax error at offset " + std::to_string(off) + ": found " + found +
                          ", expected one of {";
          for (std::size_t i = 0; i < exp.size(); ++i) m += (i ? ", " : "") + exp[i];
          return m + "}";
      }()),
      offset(off),
      expected(std::move(exp)) {}

namespace {

class Parser {
public:
    explicit Parser(std::string_view t) : s(t) {}

    Formula run() {
        Formula f = parse_imp();
        skip();
        if (pos != s.size()) fail({"\"->\"", "\"|\"", "\"&\"", "end of input"});
        return f;
    }

private:
    std::string_view s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(std::string_view tok) {
        skip();
        if (s.substr(pos, tok.size()) == tok) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(std::vector<std::string> expected) {
        skip();
        std::string found = pos < s.size() ? "'" + std::string(1, s[pos]) + "'" : "end of input";
        throw ParseError(pos, std::move(expected), found);
    }

    Formula parse_imp() {
        Formula l = parse_or();
        if (eat("->")) return imp(l, parse_imp());
        return l;
    }
    Formula parse_or() {
        Formula l = parse_and();
        while (eat("|")) l = disj(l, parse_and());
        return l;
    }
    Formula parse_and() {
        Formula l = parse_unary();
        while (eat("&")) l = conj(l, parse_unary());
        return l;
    }
    Formula parse_unary() {
        if (eat("~")) return neg(parse_unary());
        if (eat("[]")) return box(parse_unary());
        if (eat("<>")) return dia(parse_unary());
        return parse_atom();
    }
    Formula parse_atom() {
        skip();
        if (eat("(")) {
            Formula f = parse_imp();
            if (!eat(")")) fail({"\")\"", "\"->\"", "\"|\"", "\"&\""});
            return f;
        }
        if (pos < s.size() && s[pos] >= 'a' && s[pos] <= 'z') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string id(s.substr(start, pos - start));
            if (id == "false") return bot();
            return atom(id);
        }
        fail({"identifier", "\"false\"", "\"(\"", "\"~\"", "\"[]\"", "\"<>\""});
    }
};

// precedence: imp 1, or 2, and 3, unary 4
void render(Formula f, int ctx, std::string& out) {
    auto wrap = [&](int level, auto&& body) {
        bool p = ctx > level;
        if (p) out += '(';
        body();
        if (p) out += ')';
    };
    switch (f->op) {
        case Op::Atom: out += f->name; break;
        case Op::Bot: out += "false"; break;
        case Op::Box: out += "[]"; render(f->a, 4, out); break;
        case Op::Dia: out += "<>"; render(f->a, 4, out); break;
        case Op::Imp:
            if (f->b->op == Op::Bot) {
                out += '~';
                render(f->a, 4, out);
                break;
            }
            wrap(1, [&] {
                render(f->a, 2, out);
                out += " -> ";
                render(f->b, 1, out);
            });
            break;
        case Op::Or:
            wrap(2, [&] {
                render(f->a, 2, out);
                out += " | ";
                render(f->b, 3, out);
            });
            break;
        case Op::And:
            wrap(3, [&] {
                render(f->a, 3, out);
                out += " & ";
                render(f->b, 4, out);
            });
            break;
    }
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).run(); }

std::string render_formula(Formula f) {
    std::string out;
    render(f, 0, out);
    return out;
}

FormulaSet subformula_closure(Formula f) {
    FormulaSet out;
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        if (!out.insert(g).second) continue;
        if (g->a) stack.push_back(g->a);
        if (g->b) stack.push_back(g->b);
    }
    return out;
}

std::set<std::string> atoms_of(Formula f) {
    std::set<std::string> out;
    for (Formula g : subformula_closure(f))
        if (g->op == Op::Atom) out.insert(g->name);
    return out;
}

// ---- standard translation

namespace {

Fo mk(FoOp op, Fo a = nullptr, Fo b = nullptr) {
    auto n = std::make_shared<FoFormula>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

struct Translator {
    std::string avoid;
    int counter = 0;

    std::string fresh() {
        for (;;) {
            std::string v = "y" + std::to_string(counter++);
            if (v != avoid) return v;
        }
    }

    Fo go(const std::string& x, Formula f) {
        switch (f->op) {
            case Op::Atom: {
                auto n = std::make_shared<FoFormula>();
                n->op = FoOp::Pred;
                n->pred = f->name;
                n->x = x;
                return n;
            }
            case Op::Bot: return mk(FoOp::Bot);
            case Op::And: return mk(FoOp::And, go(x, f->a), go(x, f->b));
            case Op::Or: return mk(FoOp::Or, go(x, f->a), go(x, f->b));
            case Op::Imp: return mk(FoOp::Imp, go(x, f->a), go(x, f->b));
            case Op::Box:
            case Op::Dia: {
                std::string y = fresh();
                auto rel = std::make_shared<FoFormula>();
                rel->op = FoOp::Rel;
                rel->x = x;
                rel->y = y;
                bool isbox = f->op == Op::Box;
                auto q = std::make_shared<FoFormula>();
                q->op = isbox ? FoOp::Forall : FoOp::Exists;
                q->x = y;
                q->a = mk(isbox ? FoOp::Imp : FoOp::And, rel, go(y, f->a));
                return q;
            }
        }
        return nullptr;
    }
};

int fo_prec(FoOp op) {
    switch (op) {
        case FoOp::Imp: return 1;
        case FoOp::Or: return 2;
        case FoOp::And: return 3;
        default: return 4;
    }
}

void render_fo_into(const Fo& f, int ctx, std::string& out) {
    int p = fo_prec(f->op);
    bool paren = ctx > p;
    if (paren) out += '(';
    switch (f->op) {
        case FoOp::Pred: out += f->pred + "(" + f->x + ")"; break;
        case FoOp::Rel: out += f->x + " R " + f->y; break;
        case FoOp::Bot: out += "false"; break;
        case FoOp::And:
            render_fo_into(f->a, 3, out);
            out += " & ";
            render_fo_into(f->b, 4, out);
            break;
        case FoOp::Or:
            render_fo_into(f->a, 2, out);
            out += " | ";
            render_fo_into(f->b, 3, out);
            break;
        case FoOp::Imp:
            render_fo_into(f->a, 2, out);
            out += " -> ";
            render_fo_into(f->b, 1, out);
            break;
        case FoOp::Forall:
        case FoOp::Exists:
            out += f->op == FoOp::Forall ? "forall " : "exists ";
            out += f->x + " (";
            render_fo_into(f->a, 0, out);
            out += ")";
            break;
    }
    if (paren) out += ')';
}

}  // namespace

Fo standard_translation(const std::string& x, Formula f) {
    Translator t{x};
    return t.go(x, f);
}

std::string render_fo(const Fo& f) {
    std::string out;
    render_fo_into(f, 0, out);
    return out;
}

std::set<std::string> free_vars(const Fo& f) {
    std::set<std::string> out;
    switch (f->op) {
        case FoOp::Pred: out.insert(f->x); break;
        case FoOp::Rel: out.insert(f->x); out.insert(f->y); break;
        case FoOp::Bot: break;
        case FoOp::And:
        case FoOp::Or:
        case FoOp::Imp: {
            out = free_vars(f->a);
            auto r = free_vars(f->b);
            out.insert(r.begin(), r.end());
            break;
        }
        case FoOp::Forall:
        case FoOp::Exists:
            out = free_vars(f->a);
            out.erase(f->x);
            break;
    }
    return out;
}

}  // namespace igl
