#include "igl/sequent.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace igl {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t p = s.find(sep, start);
        if (p == std::string_view::npos) {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, p - start)));
        start = p + sep.size();
    }
}

bool valid_label(const std::string& l) {
    if (l.empty() || l[0] < 'a' || l[0] > 'z') return false;
    for (char c : l)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

bool multiset_equal(std::vector<DisjFormula> a, std::vector<DisjFormula> b) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

bool same_sequent(const Sequent& a, const Sequent& b) {
    return a.rel == b.rel && multiset_equal(a.lhs, b.lhs) && multiset_equal(a.rhs, b.rhs);
}

bool sequent_less(const Sequent& a, const Sequent& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    auto la = a.lhs, lb = b.lhs, ra = a.rhs, rb = b.rhs;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb) return la < lb;
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    return ra < rb;
}

void normalize(Sequent& s) {
    std::sort(s.lhs.begin(), s.lhs.end());
    std::sort(s.rhs.begin(), s.rhs.end());
}

bool contains(const std::vector<DisjFormula>& side, const DisjFormula& f) {
    return std::find(side.begin(), side.end(), f) != side.end();
}

bool subset_of(const std::vector<DisjFormula>& small, const std::vector<DisjFormula>& big) {
    for (const auto& f : small)
        if (!contains(big, f)) return false;
    return true;
}

bool remove_one(std::vector<DisjFormula>& side, const DisjFormula& f) {
    auto it = std::find(side.begin(), side.end(), f);
    if (it == side.end()) return false;
    side.erase(it);
    return true;
}

LabelSet labels(const RelCtx& r) {
    LabelSet out;
    for (const auto& [a, b] : r) {
        out.insert(a);
        out.insert(b);
    }
    return out;
}

LabelSet labels(const Sequent& s) {
    LabelSet out = labels(s.rel);
    for (const auto* side : {&s.lhs, &s.rhs})
        for (const auto& d : *side)
            for (const auto& f : d.ds) out.insert(f.label);
    return out;
}

int max_degree(const Sequent& s) {
    int d = 0;
    for (const auto* side : {&s.lhs, &s.rhs})
        for (const auto& f : *side) d = std::max<int>(d, f.degree());
    return d;
}

Label fresh_label(const Sequent& s, const LabelSet& avoid) {
    LabelSet used = labels(s);
    for (int k = 0;; ++k) {
        Label l = "y" + std::to_string(k);
        if (!used.count(l) && !avoid.count(l)) return l;
    }
}

LabelledFormula rename(const LabelledFormula& f, const Renaming& m) {
    auto it = m.find(f.label);
    return {it == m.end() ? f.label : it->second, f.formula};
}

DisjFormula rename(const DisjFormula& f, const Renaming& m) {
    DisjFormula out;
    for (const auto& d : f.ds) out.ds.push_back(rename(d, m));
    return out;
}

Sequent rename(const Sequent& s, const Renaming& m) {
    auto r = [&](const Label& l) {
        auto it = m.find(l);
        return it == m.end() ? l : it->second;
    };
    Sequent out;
    for (const auto& [a, b] : s.rel) out.rel.insert({r(a), r(b)});
    for (const auto& f : s.lhs) out.lhs.push_back(rename(f, m));
    for (const auto& f : s.rhs) out.rhs.push_back(rename(f, m));
    return out;
}

RelCtx transitive_closure(const RelCtx& r) {
    RelCtx out = r;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<RelAtom> add;
        for (const auto& [a, b] : out)
            for (auto it = out.lower_bound({b, ""}); it != out.end() && it->first == b; ++it)
                if (!out.count({a, it->second})) add.push_back({a, it->second});
        for (auto& e : add) changed |= out.insert(e).second;
    }
    return out;
}

std::string render(const LabelledFormula& f) { return f.label + ":" + render_formula(f.formula); }

std::string render(const DisjFormula& f) {
    std::string out;
    for (std::size_t i = 0; i < f.ds.size(); ++i) {
        if (i) out += " \\/ ";
        std::string body = render_formula(f.ds[i].formula);
        // keep "\/" unambiguous against formula-level connectives
        if (f.ds.size() > 1 && body.find_first_of(" ") != std::string::npos)
            body = "(" + body + ")";
        out += f.ds[i].label + ":" + body;
    }
    return out;
}

std::string render_sequent(const Sequent& s) {
    std::string out;
    bool first = true;
    for (const auto& [a, b] : s.rel) {
        out += (first ? "" : ", ") + a + "R" + b;
        first = false;
    }
    if (!s.rel.empty()) out += " | ";
    for (std::size_t i = 0; i < s.lhs.size(); ++i) out += (i ? ", " : "") + render(s.lhs[i]);
    out += s.lhs.empty() ? "=> " : " => ";
    for (std::size_t i = 0; i < s.rhs.size(); ++i) out += (i ? ", " : "") + render(s.rhs[i]);
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

DisjFormula parse_disj(std::string_view text) {
    DisjFormula out;
    for (const auto& part : split(text, "\\/")) {
        auto colon = part.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("labelled formula needs 'label:' prefix: " + part);
        std::string l = trim(std::string_view(part).substr(0, colon));
        if (!valid_label(l)) throw std::invalid_argument("bad label: " + l);
        out.ds.push_back({l, parse_formula(std::string_view(part).substr(colon + 1))});
    }
    return out;
}

Sequent parse_sequent(std::string_view text) {
    auto arrow = text.find("=>");
    if (arrow == std::string_view::npos) throw std::invalid_argument("sequent needs '=>'");
    std::string_view left = text.substr(0, arrow);
    std::string_view right = text.substr(arrow + 2);
    Sequent s;
    auto bar = left.find('|');
    if (bar != std::string_view::npos && left.substr(0, bar).find(':') == std::string_view::npos) {
        for (const auto& atom : split(left.substr(0, bar), ",")) {
            if (atom.empty()) continue;
            auto r = atom.find('R');
            if (r == std::string::npos) throw std::invalid_argument("bad relational atom: " + atom);
            std::string a = trim(std::string_view(atom).substr(0, r));
            std::string b = trim(std::string_view(atom).substr(r + 1));
            if (!valid_label(a) || !valid_label(b))
                throw std::invalid_argument("bad relational atom: " + atom);
            s.rel.insert({a, b});
        }
        left = left.substr(bar + 1);
    }
    for (const auto& f : split(left, ","))
        if (!f.empty()) s.lhs.push_back(parse_disj(f));
    for (const auto& f : split(right, ","))
        if (!f.empty()) s.rhs.push_back(parse_disj(f));
    return s;
}

}  // namespace igl
