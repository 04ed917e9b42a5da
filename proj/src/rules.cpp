#include "igl/rules.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace igl {

std::string system_name(SystemId s) {
    switch (s) {
        case SystemId::K: return "K";
        case SystemId::K4: return "K4";
        case SystemId::IK: return "IK";
        case SystemId::IK4: return "IK4";
        case SystemId::mIK4: return "mIK4";
        case SystemId::dIK4: return "dIK4";
    }
    return "?";
}

SystemId parse_system(const std::string& s) {
    if (s == "K") return SystemId::K;
    if (s == "K4" || s == "gl") return SystemId::K4;
    if (s == "IK") return SystemId::IK;
    if (s == "IK4" || s == "igl") return SystemId::IK4;
    if (s == "mIK4" || s == "migl") return SystemId::mIK4;
    if (s == "dIK4") return SystemId::dIK4;
    throw std::invalid_argument("unknown system: " + s);
}

bool has_tr(SystemId s) { return s != SystemId::K && s != SystemId::IK; }
bool single_succedent(SystemId s) {
    return s == SystemId::IK || s == SystemId::IK4 || s == SystemId::dIK4;
}

static const char* kRuleNames[] = {
    "id",   "botL", "cut",  "wL",   "wR",   "cL",   "cR", "th",         "impL",
    "impR", "andL", "andR", "orL",  "orR",  "boxL", "boxR", "diaL",     "diaR",
    "tr",   "macro-impL", "macro-diaR", "dis-orL", "dis-orR"};

std::string rule_name(Rule r) { return kRuleNames[static_cast<int>(r)]; }

std::optional<Rule> parse_rule(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(Rule::dis_orR); ++i)
        if (s == kRuleNames[i]) return static_cast<Rule>(i);
    return std::nullopt;
}

std::optional<std::string> system_violation(const Sequent& s, SystemId sys) {
    if (single_succedent(sys) && s.rhs.size() != 1)
        return "system " + system_name(sys) + " needs exactly one formula on the right";
    if (sys != SystemId::dIK4 && max_degree(s) > 1)
        return "disjunctions of labelled formulas only occur in dIK4";
    for (const auto* side : {&s.lhs, &s.rhs})
        for (const auto& f : *side)
            if (f.ds.empty()) return "empty disjunction";
    return std::nullopt;
}

namespace {

using Side_ = std::vector<DisjFormula>;

struct Expect {
    Side_ remL, addL, remR, addR;
    RelCtx rel;
};

Side_ minus(Side_ base, const Side_& rem) {
    for (const auto& f : rem) remove_one(base, f);
    return base;
}
Side_ plus(Side_ base, const Side_& add) {
    base.insert(base.end(), add.begin(), add.end());
    return base;
}

// 2 = strict, 1 = generalized, 0 = no match
int match_premiss(const Sequent& c, const Sequent& p, const Expect& e) {
    if (p.rel != e.rel) return 0;
    if (multiset_equal(p.lhs, plus(minus(c.lhs, e.remL), e.addL)) &&
        multiset_equal(p.rhs, plus(minus(c.rhs, e.remR), e.addR)))
        return 2;
    if (subset_of(p.lhs, plus(c.lhs, e.addL)) && subset_of(p.rhs, plus(c.rhs, e.addR))) return 1;
    return 0;
}

StepCheck fail(std::string m) { return {false, false, std::move(m)}; }

StepCheck combine(const std::vector<int>& levels, const std::string& what) {
    int lo = 2;
    for (int l : levels) lo = std::min(lo, l);
    if (lo == 0) return fail("premiss does not match the " + what + " schema");
    return {true, lo == 1, ""};
}

std::set<LabelledFormula> disjunct_set(const DisjFormula& f) {
    return {f.ds.begin(), f.ds.end()};
}

bool is_sub_disjunction(const DisjFormula& small, const DisjFormula& big) {
    if (small.ds.empty()) return false;
    auto b = disjunct_set(big);
    for (const auto& d : small.ds)
        if (!b.count(d)) return false;
    return true;
}

// New formulas of `p` relative to `c` (set difference).
Side_ fresh_side(const Side_& p, const Side_& c) {
    Side_ out;
    for (const auto& f : p)
        if (!contains(c, f) && !contains(out, f)) out.push_back(f);
    return out;
}

const DisjFormula* at(const Sequent& s, const Position& pos) {
    const auto& side = pos.side == Side::L ? s.lhs : s.rhs;
    if (pos.index < 0 || pos.index >= static_cast<int>(side.size())) return nullptr;
    return &side[pos.index];
}

}  // namespace

StepCheck check_step(Rule rule, const Sequent& c, const std::vector<Sequent>& prem,
                     const std::vector<Position>& principal, const std::optional<Label>& fresh,
                     const std::optional<DisjFormula>& cut_formula, SystemId sys) {
    if (auto v = system_violation(c, sys)) return fail("conclusion: " + *v);
    for (const auto& p : prem)
        if (auto v = system_violation(p, sys)) return fail("premiss: " + *v);
    if ((rule == Rule::dis_orL || rule == Rule::dis_orR) && sys != SystemId::dIK4)
        return fail(rule_name(rule) + " only exists in dIK4");
    if (rule == Rule::tr && !has_tr(sys)) return fail("tr is not a rule of " + system_name(sys));

    auto need = [&](std::size_t n) { return prem.size() == n; };

    // Locate the principal formula for rules that have one.
    const DisjFormula* pf = nullptr;
    Position pp{Side::L, -1};
    if (!principal.empty()) {
        pp = principal.front();
        pf = at(c, pp);
        if (!pf) return fail("principal position out of range");
    }
    auto logical = [&](Side side, Op op) -> const LabelledFormula* {
        if (!pf || pp.side != side || !pf->labelled() || pf->formula()->op != op) return nullptr;
        return &pf->lf();
    };

    switch (rule) {
        case Rule::id: {
            if (!need(0)) return fail("id has no premisses");
            for (const auto& l : c.lhs) {
                if (!l.labelled() || l.formula()->op != Op::Atom) continue;
                for (const auto& r : c.rhs) {
                    if (r == l) {
                        bool strict = c.lhs.size() == 1 && c.rhs.size() == 1;
                        return {true, !strict, ""};
                    }
                }
            }
            return fail("id needs x:p on both sides");
        }
        case Rule::botL: {
            if (!need(0)) return fail("botL has no premisses");
            for (const auto& l : c.lhs)
                if (l.labelled() && l.formula()->op == Op::Bot) return {true, false, ""};
            return fail("botL needs x:false on the left");
        }
        case Rule::cut: {
            if (!need(2) || !cut_formula) return fail("cut needs two premisses and a cut formula");
            const DisjFormula& phi = *cut_formula;
            if (sys != SystemId::dIK4 && !phi.labelled()) return fail("cut formula degree");
            const Sequent &a = prem[0], &b = prem[1];
            if (a.rel != c.rel || b.rel != c.rel) return fail("cut: relational contexts differ");
            if (!contains(a.rhs, phi) || !contains(b.lhs, phi))
                return fail("cut formula missing in premisses");
            Side_ ar = a.rhs, bl = b.lhs;
            remove_one(ar, phi);
            remove_one(bl, phi);
            if (multiset_equal(plus(a.lhs, bl), c.lhs) && multiset_equal(plus(ar, b.rhs), c.rhs))
                return {true, false, ""};
            if (subset_of(a.lhs, c.lhs) && subset_of(bl, c.lhs) && subset_of(ar, c.rhs) &&
                subset_of(b.rhs, c.rhs))
                return {true, true, ""};
            return fail("cut: contexts do not split the conclusion");
        }
        case Rule::wL:
        case Rule::wR:
        case Rule::cL:
        case Rule::cR: {
            if (!need(1) || !pf) return fail("structural rule needs one premiss and a principal");
            bool left = rule == Rule::wL || rule == Rule::cL;
            if ((pp.side == Side::L) != left) return fail("principal on the wrong side");
            Expect e;
            e.rel = c.rel;
            bool weak = rule == Rule::wL || rule == Rule::wR;
            (left ? (weak ? e.remL : e.addL) : (weak ? e.remR : e.addR)).push_back(*pf);
            int m = match_premiss(c, prem[0], e);
            if (m != 2) return fail(rule_name(rule) + " premiss mismatch");
            return {true, false, ""};
        }
        case Rule::th: {
            if (!need(1)) return fail("th has one premiss");
            const Sequent& p = prem[0];
            if (!std::includes(c.rel.begin(), c.rel.end(), p.rel.begin(), p.rel.end()))
                return fail("th premiss rel must be contained in the conclusion's");
            if (!multiset_equal(p.lhs, c.lhs) || !multiset_equal(p.rhs, c.rhs))
                return fail("th changes only the relational context");
            return {true, false, ""};
        }
        case Rule::impL:
        case Rule::macro_impL: {
            auto f = logical(Side::L, Op::Imp);
            if (!f || !need(2)) return fail("impL needs x:A->B on the left and two premisses");
            DisjFormula A(f->label, f->formula->a), B(f->label, f->formula->b);
            const Sequent &a = prem[0], &b = prem[1];
            if (a.rel != c.rel || b.rel != c.rel) return fail("impL: relational contexts differ");
            if (rule == Rule::macro_impL) {
                Expect e1{{}, {}, {}, {A}, c.rel}, e2{{}, {B}, {}, {}, c.rel};
                return combine({match_premiss(c, a, e1), match_premiss(c, b, e2)}, "macro-impL");
            }
            // strict: contexts split
            Side_ ar = a.rhs, bl = b.lhs;
            bool hasA = remove_one(ar, A), hasB = remove_one(bl, B);
            Side_ rest = c.lhs;
            remove_one(rest, *pf);
            if (hasA && hasB && multiset_equal(plus(a.lhs, bl), rest) &&
                multiset_equal(plus(ar, b.rhs), c.rhs))
                return {true, false, ""};
            if (subset_of(a.lhs, c.lhs) && subset_of(a.rhs, plus(c.rhs, {A})) &&
                subset_of(b.lhs, plus(c.lhs, {B})) && subset_of(b.rhs, c.rhs))
                return {true, true, ""};
            return fail("impL premisses do not match");
        }
        case Rule::impR: {
            auto f = logical(Side::R, Op::Imp);
            if (!f || !need(1)) return fail("impR needs x:A->B on the right and one premiss");
            DisjFormula A(f->label, f->formula->a), B(f->label, f->formula->b);
            Expect e{{}, {A}, {*pf}, {B}, c.rel};
            int m = match_premiss(c, prem[0], e);
            if (sys == SystemId::mIK4 && m > 0) {
                if (prem[0].rhs.size() != 1) return fail("mIK4 impR needs one formula on the right");
                if (c.rhs.size() != 1) m = 1;
            }
            return combine({m}, "impR");
        }
        case Rule::andL:
        case Rule::orL: {
            Op op = rule == Rule::andL ? Op::And : Op::Or;
            auto f = logical(Side::L, op);
            if (!f) return fail(rule_name(rule) + " principal mismatch");
            DisjFormula A0(f->label, f->formula->a), A1(f->label, f->formula->b);
            if (rule == Rule::andL) {
                if (!need(1)) return fail("andL has one premiss");
                int m0 = match_premiss(c, prem[0], {{*pf}, {A0}, {}, {}, c.rel});
                int m1 = match_premiss(c, prem[0], {{*pf}, {A1}, {}, {}, c.rel});
                int m = std::max(m0, m1);
                if (m == 0 && match_premiss(c, prem[0], {{}, {A0, A1}, {}, {}, c.rel})) m = 1;
                return combine({m}, "andL");
            }
            if (!need(2)) return fail("orL has two premisses");
            return combine({match_premiss(c, prem[0], {{*pf}, {A0}, {}, {}, c.rel}),
                            match_premiss(c, prem[1], {{*pf}, {A1}, {}, {}, c.rel})},
                           "orL");
        }
        case Rule::andR:
        case Rule::orR: {
            Op op = rule == Rule::andR ? Op::And : Op::Or;
            auto f = logical(Side::R, op);
            if (!f) return fail(rule_name(rule) + " principal mismatch");
            DisjFormula A0(f->label, f->formula->a), A1(f->label, f->formula->b);
            if (rule == Rule::orR) {
                if (!need(1)) return fail("orR has one premiss");
                int m0 = match_premiss(c, prem[0], {{}, {}, {*pf}, {A0}, c.rel});
                int m1 = match_premiss(c, prem[0], {{}, {}, {*pf}, {A1}, c.rel});
                int m = std::max(m0, m1);
                if (m == 0 && match_premiss(c, prem[0], {{}, {}, {}, {A0, A1}, c.rel})) m = 1;
                return combine({m}, "orR");
            }
            if (!need(2)) return fail("andR has two premisses");
            return combine({match_premiss(c, prem[0], {{}, {}, {*pf}, {A0}, c.rel}),
                            match_premiss(c, prem[1], {{}, {}, {*pf}, {A1}, c.rel})},
                           "andR");
        }
        case Rule::boxL:
        case Rule::diaR:
        case Rule::macro_diaR: {
            bool left = rule == Rule::boxL;
            auto f = logical(left ? Side::L : Side::R, left ? Op::Box : Op::Dia);
            if (!f || !need(1)) return fail(rule_name(rule) + " principal mismatch");
            // the target is read off the premiss: the one new labelled formula
            const Sequent& p = prem[0];
            Side_ nw = fresh_side(left ? p.lhs : p.rhs, left ? c.lhs : c.rhs);
            if (nw.size() > 1) return fail(rule_name(rule) + ": more than one new formula");
            if (nw.empty()) {
                // premiss is a weakening of the conclusion
                Expect e{{}, {}, {}, {}, c.rel};
                return combine({match_premiss(c, p, e) ? 1 : 0}, rule_name(rule));
            }
            const DisjFormula& nf = nw.front();
            if (!nf.labelled() || nf.formula() != f->formula->a ||
                !c.rel.count({f->label, nf.label()}))
                return fail(rule_name(rule) + ": new formula must be y:A with xRy");
            Expect e;
            e.rel = c.rel;
            if (left) {
                e.remL = {*pf};
                e.addL = {nf};
            } else {
                if (rule == Rule::diaR) e.remR = {*pf};
                e.addR = {nf};
            }
            return combine({match_premiss(c, p, e)}, rule_name(rule));
        }
        case Rule::boxR:
        case Rule::diaL: {
            bool left = rule == Rule::diaL;
            auto f = logical(left ? Side::L : Side::R, left ? Op::Dia : Op::Box);
            if (!f || !need(1) || !fresh) return fail(rule_name(rule) + " needs a fresh label");
            if (labels(c).count(*fresh)) return fail("y fresh: " + *fresh + " occurs in the conclusion");
            DisjFormula Y(*fresh, f->formula->a);
            Expect e;
            e.rel = c.rel;
            e.rel.insert({f->label, *fresh});
            if (left) {
                e.remL = {*pf};
                e.addL = {Y};
            } else {
                e.remR = {*pf};
                e.addR = {Y};
            }
            int m = match_premiss(c, prem[0], e);
            if (!left && sys == SystemId::mIK4 && m > 0) {
                if (prem[0].rhs.size() != 1) return fail("mIK4 boxR needs one formula on the right");
                if (c.rhs.size() != 1) m = 1;
            }
            return combine({m}, rule_name(rule));
        }
        case Rule::tr: {
            if (!need(1)) return fail("tr has one premiss");
            const Sequent& p = prem[0];
            if (!std::includes(p.rel.begin(), p.rel.end(), c.rel.begin(), c.rel.end()))
                return fail("tr premiss must keep the relational context");
            RelCtx diff;
            std::set_difference(p.rel.begin(), p.rel.end(), c.rel.begin(), c.rel.end(),
                                std::inserter(diff, diff.end()));
            if (diff.size() > 1) return fail("tr adds one atom");
            for (const auto& [x, z] : diff) {
                bool found = false;
                for (const auto& [a, y] : c.rel)
                    if (a == x && c.rel.count({y, z})) found = true;
                if (!found) return fail("tr: no xRy, yRz for the added atom");
            }
            if (multiset_equal(p.lhs, c.lhs) && multiset_equal(p.rhs, c.rhs)) return {true, false, ""};
            if (subset_of(p.lhs, c.lhs) && subset_of(p.rhs, c.rhs)) return {true, true, ""};
            return fail("tr changes only the relational context");
        }
        case Rule::dis_orL: {
            if (!pf || pp.side != Side::L || pf->degree() < 2 || !need(2))
                return fail("dis-orL needs a disjunction on the left and two premisses");
            Side_ rest = c.lhs;
            remove_one(rest, *pf);
            std::vector<DisjFormula> parts;
            bool strict = true;
            for (const auto& p : prem) {
                if (p.rel != c.rel) return fail("dis-orL: relational contexts differ");
                Side_ nw = fresh_side(p.lhs, c.lhs);
                if (nw.size() > 1) return fail("dis-orL: more than one new formula");
                if (!subset_of(p.rhs, c.rhs)) return fail("dis-orL: right side changed");
                for (const auto& n : nw)
                    if (!is_sub_disjunction(n, *pf)) return fail("dis-orL: not a sub-disjunction");
                Side_ extra = minus(p.lhs, rest);
                if (extra.size() != 1 || !multiset_equal(minus(p.lhs, extra), rest) ||
                    !multiset_equal(p.rhs, c.rhs))
                    strict = false;
                parts.push_back(extra.size() == 1 ? extra.front() : DisjFormula());
            }
            if (strict) {
                std::vector<LabelledFormula> cat = parts[0].ds;
                cat.insert(cat.end(), parts[1].ds.begin(), parts[1].ds.end());
                if (cat == pf->ds && !parts[0].ds.empty() && !parts[1].ds.empty())
                    return {true, false, ""};
            }
            // generalized: the two sides must cover the principal
            Side_ n0 = fresh_side(prem[0].lhs, c.lhs), n1 = fresh_side(prem[1].lhs, c.lhs);
            if (!n0.empty() && !n1.empty()) {
                auto s = disjunct_set(n0.front());
                for (const auto& d : n1.front().ds) s.insert(d);
                if (s != disjunct_set(*pf)) return fail("dis-orL premisses do not cover the disjunction");
            }
            return {true, true, ""};
        }
        case Rule::dis_orR: {
            if (!pf || pp.side != Side::R || pf->degree() < 2 || !need(1))
                return fail("dis-orR needs a disjunction on the right and one premiss");
            const Sequent& p = prem[0];
            if (p.rel != c.rel) return fail("dis-orR: relational contexts differ");
            Side_ nw = fresh_side(p.rhs, c.rhs);
            if (nw.size() > 1) return fail("dis-orR: more than one new formula");
            if (!subset_of(p.lhs, c.lhs)) return fail("dis-orR: left side changed");
            if (nw.empty()) return {true, true, ""};
            const DisjFormula& n = nw.front();
            if (!is_sub_disjunction(n, *pf)) return fail("dis-orR: not a sub-disjunction");
            const auto& d = pf->ds;
            std::size_t k = n.ds.size();
            bool prefix = k < d.size() && std::equal(n.ds.begin(), n.ds.end(), d.begin());
            bool suffix = k < d.size() && std::equal(n.ds.begin(), n.ds.end(), d.end() - k);
            Expect e{{}, {}, {*pf}, {n}, c.rel};
            if ((prefix || suffix) && match_premiss(c, p, e) == 2) return {true, false, ""};
            return {true, true, ""};
        }
    }
    return fail("unknown rule");
}

// ---- enumeration

namespace {

struct Builder {
    const Sequent& s;
    SystemId sys;
    std::vector<RuleInstance> out;

    void emit(Rule r, std::vector<Sequent> prem, std::vector<Position> pos = {},
              std::optional<Label> fresh = {}, std::optional<Label> target = {},
              std::optional<DisjFormula> cutf = {}) {
        for (const auto& p : prem)
            if (system_violation(p, sys)) return;
        out.push_back({r, s, std::move(prem), std::move(pos), std::move(fresh), std::move(target),
                       std::move(cutf)});
    }
    Sequent with(const Side_& lhs, const Side_& rhs) const { return {s.rel, lhs, rhs}; }
    Side_ drop(const Side_& side, int i) const {
        Side_ o = side;
        o.erase(o.begin() + i);
        return o;
    }
};

}  // namespace

std::vector<RuleInstance> applicable_rules(const Sequent& s, SystemId sys, const RuleConfig& cfg) {
    if (auto v = system_violation(s, sys)) throw std::invalid_argument(*v);
    Builder b{s, sys, {}};
    const int nl = static_cast<int>(s.lhs.size()), nr = static_cast<int>(s.rhs.size());
    bool multi = !single_succedent(sys);
    bool drop_delta = sys == SystemId::mIK4;

    auto lf = [](const DisjFormula& d, Op op) { return d.labelled() && d.formula()->op == op; };

    // id, botL
    for (int i = 0; i < nl; ++i)
        if (lf(s.lhs[i], Op::Atom))
            for (int j = 0; j < nr; ++j)
                if (s.rhs[j] == s.lhs[i]) b.emit(Rule::id, {}, {{Side::L, i}, {Side::R, j}});
    for (int i = 0; i < nl; ++i)
        if (lf(s.lhs[i], Op::Bot)) b.emit(Rule::botL, {}, {{Side::L, i}});
    // cut, only from supplied candidates
    for (const auto& phi : cfg.cut_candidates) {
        Sequent a = b.with(s.lhs, multi ? plus(s.rhs, {phi}) : Side_{phi});
        Sequent c = b.with(plus(s.lhs, {phi}), s.rhs);
        b.emit(Rule::cut, {a, c}, {}, {}, {}, phi);
    }
    if (cfg.structural) {
        for (int i = 0; i < nl; ++i) b.emit(Rule::wL, {b.with(b.drop(s.lhs, i), s.rhs)}, {{Side::L, i}});
        for (int j = 0; j < nr; ++j) b.emit(Rule::wR, {b.with(s.lhs, b.drop(s.rhs, j))}, {{Side::R, j}});
        for (int i = 0; i < nl; ++i) b.emit(Rule::cL, {b.with(plus(s.lhs, {s.lhs[i]}), s.rhs)}, {{Side::L, i}});
        for (int j = 0; j < nr; ++j) b.emit(Rule::cR, {b.with(s.lhs, plus(s.rhs, {s.rhs[j]}))}, {{Side::R, j}});
        for (const auto& a : s.rel) {
            Sequent p = s;
            p.rel.erase(a);
            b.emit(Rule::th, {p});
        }
    }
    for (int i = 0; i < nl; ++i) {
        if (!lf(s.lhs[i], Op::Imp)) continue;
        const auto& f = s.lhs[i].lf();
        Side_ rest = b.drop(s.lhs, i);
        DisjFormula A(f.label, f.formula->a), B(f.label, f.formula->b);
        b.emit(Rule::impL,
               {b.with(rest, multi ? plus(s.rhs, {A}) : Side_{A}), b.with(plus(rest, {B}), s.rhs)},
               {{Side::L, i}});
    }
    for (int j = 0; j < nr; ++j) {
        if (!lf(s.rhs[j], Op::Imp)) continue;
        const auto& f = s.rhs[j].lf();
        DisjFormula A(f.label, f.formula->a), B(f.label, f.formula->b);
        Side_ rhs = drop_delta ? Side_{B} : plus(b.drop(s.rhs, j), {B});
        b.emit(Rule::impR, {b.with(plus(s.lhs, {A}), rhs)}, {{Side::R, j}});
    }
    for (int i = 0; i < nl; ++i) {
        if (!lf(s.lhs[i], Op::And)) continue;
        const auto& f = s.lhs[i].lf();
        for (Formula part : {f.formula->a, f.formula->b})
            b.emit(Rule::andL, {b.with(plus(b.drop(s.lhs, i), {DisjFormula(f.label, part)}), s.rhs)},
                   {{Side::L, i}});
    }
    for (int j = 0; j < nr; ++j) {
        if (!lf(s.rhs[j], Op::And)) continue;
        const auto& f = s.rhs[j].lf();
        Side_ rest = b.drop(s.rhs, j);
        b.emit(Rule::andR,
               {b.with(s.lhs, plus(rest, {DisjFormula(f.label, f.formula->a)})),
                b.with(s.lhs, plus(rest, {DisjFormula(f.label, f.formula->b)}))},
               {{Side::R, j}});
    }
    for (int i = 0; i < nl; ++i) {
        if (!lf(s.lhs[i], Op::Or)) continue;
        const auto& f = s.lhs[i].lf();
        Side_ rest = b.drop(s.lhs, i);
        b.emit(Rule::orL,
               {b.with(plus(rest, {DisjFormula(f.label, f.formula->a)}), s.rhs),
                b.with(plus(rest, {DisjFormula(f.label, f.formula->b)}), s.rhs)},
               {{Side::L, i}});
    }
    for (int j = 0; j < nr; ++j) {
        if (!lf(s.rhs[j], Op::Or)) continue;
        const auto& f = s.rhs[j].lf();
        for (Formula part : {f.formula->a, f.formula->b})
            b.emit(Rule::orR, {b.with(s.lhs, plus(b.drop(s.rhs, j), {DisjFormula(f.label, part)}))},
                   {{Side::R, j}});
    }
    for (int i = 0; i < nl; ++i) {
        if (!lf(s.lhs[i], Op::Box)) continue;
        const auto& f = s.lhs[i].lf();
        for (const auto& [x, y] : s.rel)
            if (x == f.label)
                b.emit(Rule::boxL,
                       {b.with(plus(b.drop(s.lhs, i), {DisjFormula(y, f.formula->a)}), s.rhs)},
                       {{Side::L, i}}, {}, y);
    }
    Label y = fresh_label(s);
    for (int j = 0; j < nr; ++j) {
        if (!lf(s.rhs[j], Op::Box)) continue;
        const auto& f = s.rhs[j].lf();
        Sequent p = s;
        p.rel.insert({f.label, y});
        DisjFormula Y(y, f.formula->a);
        p.rhs = drop_delta ? Side_{Y} : plus(b.drop(s.rhs, j), {Y});
        b.emit(Rule::boxR, {p}, {{Side::R, j}}, y);
    }
    for (int i = 0; i < nl; ++i) {
        if (!lf(s.lhs[i], Op::Dia)) continue;
        const auto& f = s.lhs[i].lf();
        Sequent p = s;
        p.rel.insert({f.label, y});
        p.lhs = plus(b.drop(s.lhs, i), {DisjFormula(y, f.formula->a)});
        b.emit(Rule::diaL, {p}, {{Side::L, i}}, y);
    }
    for (int j = 0; j < nr; ++j) {
        if (!lf(s.rhs[j], Op::Dia)) continue;
        const auto& f = s.rhs[j].lf();
        for (const auto& [x, t] : s.rel)
            if (x == f.label)
                b.emit(Rule::diaR,
                       {b.with(s.lhs, plus(b.drop(s.rhs, j), {DisjFormula(t, f.formula->a)}))},
                       {{Side::R, j}}, {}, t);
    }
    if (has_tr(sys)) {
        for (const auto& [x, m] : s.rel)
            for (auto it = s.rel.lower_bound({m, ""}); it != s.rel.end() && it->first == m; ++it) {
                if (s.rel.count({x, it->second})) continue;
                Sequent p = s;
                p.rel.insert({x, it->second});
                bool dup = false;
                for (const auto& r : b.out)
                    if (r.rule == Rule::tr && r.premisses[0].rel == p.rel) dup = true;
                if (!dup) b.emit(Rule::tr, {p});
            }
    }
    if (sys == SystemId::dIK4) {
        for (int i = 0; i < nl; ++i) {
            const auto& d = s.lhs[i].ds;
            for (std::size_t k = 1; k < d.size(); ++k) {
                DisjFormula p0(std::vector<LabelledFormula>(d.begin(), d.begin() + k));
                DisjFormula p1(std::vector<LabelledFormula>(d.begin() + k, d.end()));
                Side_ rest = b.drop(s.lhs, i);
                b.emit(Rule::dis_orL, {b.with(plus(rest, {p0}), s.rhs), b.with(plus(rest, {p1}), s.rhs)},
                       {{Side::L, i}});
            }
        }
        for (int j = 0; j < nr; ++j) {
            const auto& d = s.rhs[j].ds;
            for (std::size_t k = 1; k < d.size(); ++k)
                for (int side = 0; side < 2; ++side) {
                    DisjFormula part(side == 0 ? std::vector<LabelledFormula>(d.begin(), d.begin() + k)
                                               : std::vector<LabelledFormula>(d.begin() + k, d.end()));
                    b.emit(Rule::dis_orR, {b.with(s.lhs, plus(b.drop(s.rhs, j), {part}))}, {{Side::R, j}});
                }
        }
    }
    return b.out;
}

std::vector<Sequent> apply_rule(const RuleInstance& r) { return r.premisses; }

// ---- saturation

Saturation is_saturated(const Sequent& s, bool classical, bool transitive) {
    Saturation out;
    if (transitive && transitive_closure(s.rel) != s.rel) {
        out.rel_closed = false;
        out.saturated = false;
    }
    auto inL = [&](const Label& x, Formula f) { return contains(s.lhs, x, f); };
    auto inR = [&](const Label& x, Formula f) { return contains(s.rhs, x, f); };
    auto succ = [&](const Label& x) {
        std::vector<Label> v;
        for (const auto& [a, b] : s.rel)
            if (a == x) v.push_back(b);
        return v;
    };
    for (int i = 0; i < static_cast<int>(s.lhs.size()); ++i) {
        const auto& d = s.lhs[i];
        if (!d.labelled()) continue;
        const Label& x = d.label();
        Formula f = d.formula();
        bool ok = true;
        switch (f->op) {
            case Op::And: ok = inL(x, f->a) && inL(x, f->b); break;
            case Op::Or: ok = inL(x, f->a) || inL(x, f->b); break;
            case Op::Imp: ok = inR(x, f->a) || inL(x, f->b); break;
            case Op::Box:
                for (const auto& y : succ(x)) ok = ok && inL(y, f->a);
                break;
            case Op::Dia: {
                ok = false;
                for (const auto& y : succ(x)) ok = ok || inL(y, f->a);
                break;
            }
            default: break;
        }
        if (!ok) out.unsaturated.push_back({Side::L, i});
    }
    for (int j = 0; j < static_cast<int>(s.rhs.size()); ++j) {
        const auto& d = s.rhs[j];
        if (!d.labelled()) continue;
        const Label& x = d.label();
        Formula f = d.formula();
        bool ok = true;
        switch (f->op) {
            case Op::And: ok = inR(x, f->a) || inR(x, f->b); break;
            case Op::Or: ok = inR(x, f->a) && inR(x, f->b); break;
            case Op::Dia:
                for (const auto& y : succ(x)) ok = ok && inR(y, f->a);
                break;
            case Op::Imp:
                if (classical) ok = inL(x, f->a) && inR(x, f->b);
                break;
            case Op::Box:
                if (classical) {
                    ok = false;
                    for (const auto& y : succ(x)) ok = ok || inR(y, f->a);
                }
                break;
            default: break;
        }
        if (!ok) out.unsaturated.push_back({Side::R, j});
    }
    if (!out.unsaturated.empty()) out.saturated = false;
    return out;
}

std::vector<RuleInstance> macro_rules(const Sequent& s, bool classical) {
    std::vector<RuleInstance> out;
    Saturation sat = is_saturated(s, classical, false);
    auto add = [](Side_ side, const Side_& extra) {
        for (const auto& f : extra)
            if (!contains(side, f)) side.push_back(f);
        return side;
    };
    LabelSet order = labels(s);
    auto succ = [&](const Label& x) {
        std::vector<Label> v;
        for (const auto& l : order)
            if (s.rel.count({x, l})) v.push_back(l);
        return v;
    };
    for (const auto& pos : sat.unsaturated) {
        const auto& d = pos.side == Side::L ? s.lhs[pos.index] : s.rhs[pos.index];
        const Label& x = d.label();
        Formula f = d.formula();
        DisjFormula A(x, f->a);
        RuleInstance r{Rule::id, s, {}, {pos}, {}, {}, {}};
        auto prem = [&](const Side_& l, const Side_& rr) { return Sequent{s.rel, l, rr}; };
        if (pos.side == Side::L) {
            switch (f->op) {
                case Op::And:
                    r.rule = Rule::andL;
                    r.premisses = {prem(add(s.lhs, {A, DisjFormula(x, f->b)}), s.rhs)};
                    break;
                case Op::Or:
                    r.rule = Rule::orL;
                    r.premisses = {prem(add(s.lhs, {A}), s.rhs),
                                   prem(add(s.lhs, {DisjFormula(x, f->b)}), s.rhs)};
                    break;
                case Op::Imp:
                    r.rule = Rule::macro_impL;
                    r.premisses = {prem(s.lhs, add(s.rhs, {A})),
                                   prem(add(s.lhs, {DisjFormula(x, f->b)}), s.rhs)};
                    break;
                case Op::Box:
                    r.rule = Rule::boxL;
                    for (const auto& y : succ(x))
                        if (!contains(s.lhs, y, f->a)) {
                            r.target = y;
                            r.premisses = {prem(add(s.lhs, {DisjFormula(y, f->a)}), s.rhs)};
                            break;
                        }
                    break;
                case Op::Dia: {
                    r.rule = Rule::diaL;
                    Label y = fresh_label(s);
                    r.fresh = y;
                    Sequent p = prem(add(s.lhs, {DisjFormula(y, f->a)}), s.rhs);
                    p.rel.insert({x, y});
                    r.premisses = {p};
                    break;
                }
                default: continue;
            }
        } else {
            switch (f->op) {
                case Op::And:
                    r.rule = Rule::andR;
                    r.premisses = {prem(s.lhs, add(s.rhs, {A})),
                                   prem(s.lhs, add(s.rhs, {DisjFormula(x, f->b)}))};
                    break;
                case Op::Or:
                    r.rule = Rule::orR;
                    r.premisses = {prem(s.lhs, add(s.rhs, {A, DisjFormula(x, f->b)}))};
                    break;
                case Op::Dia:
                    r.rule = Rule::macro_diaR;
                    for (const auto& y : succ(x))
                        if (!contains(s.rhs, y, f->a)) {
                            r.target = y;
                            r.premisses = {prem(s.lhs, add(s.rhs, {DisjFormula(y, f->a)}))};
                            break;
                        }
                    break;
                case Op::Imp:
                    r.rule = Rule::impR;
                    r.premisses = {prem(add(s.lhs, {A}), add(s.rhs, {DisjFormula(x, f->b)}))};
                    break;
                case Op::Box: {
                    r.rule = Rule::boxR;
                    Label y = fresh_label(s);
                    r.fresh = y;
                    Sequent p = prem(s.lhs, add(s.rhs, {DisjFormula(y, f->a)}));
                    p.rel.insert({x, y});
                    r.premisses = {p};
                    break;
                }
                default: continue;
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<RuleInstance> closing_rule(const Sequent& s) {
    for (int i = 0; i < static_cast<int>(s.lhs.size()); ++i) {
        const auto& l = s.lhs[i];
        if (!l.labelled()) continue;
        if (l.formula()->op == Op::Atom)
            for (int j = 0; j < static_cast<int>(s.rhs.size()); ++j)
                if (s.rhs[j] == l) return RuleInstance{Rule::id, s, {}, {{Side::L, i}, {Side::R, j}}, {}, {}, {}};
    }
    for (int i = 0; i < static_cast<int>(s.lhs.size()); ++i)
        if (s.lhs[i].labelled() && s.lhs[i].formula()->op == Op::Bot)
            return RuleInstance{Rule::botL, s, {}, {{Side::L, i}}, {}, {}, {}};
    return std::nullopt;
}

// ---- quasi-tree-like

std::optional<std::map<Label, Label>> quasi_tree_parents(const Sequent& s) {
    LabelSet vars = labels(s.rel);
    LabelSet all = labels(s);
    if (s.rel.empty()) {
        if (all.size() > 1) return std::nullopt;
        if (!s.rhs.empty() && !all.empty() && *all.begin() != s.rhs.front().label())
            return std::nullopt;
        return std::map<Label, Label>{};
    }
    for (const auto& l : all)
        if (!vars.count(l)) return std::nullopt;
    std::map<Label, std::vector<Label>> preds;
    std::vector<Label> roots;
    for (const auto& v : vars) preds[v];
    for (const auto& [a, b] : s.rel) preds[b].push_back(a);
    for (const auto& v : vars)
        if (preds[v].empty()) roots.push_back(v);
    if (roots.size() != 1) return std::nullopt;
    const Label root = roots.front();
    std::vector<Label> order(vars.begin(), vars.end());
    std::map<Label, Label> parent;
    RelCtx closure_needed = s.rel;

    auto check = [&]() {
        // every node reaches the root, and rel sits inside the closure
        std::map<Label, std::set<Label>> anc;
        std::function<bool(const Label&, int)> up = [&](const Label& v, int depth) -> bool {
            if (depth > static_cast<int>(order.size())) return false;
            if (v == root) return true;
            return up(parent.at(v), depth + 1);
        };
        for (const auto& v : order)
            if (!up(v, 0)) return false;
        for (const auto& [a, b] : s.rel) {
            Label cur = b;
            bool found = false;
            while (cur != root) {
                cur = parent.at(cur);
                if (cur == a) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    };
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
        if (k == order.size()) return check();
        const Label& v = order[k];
        if (v == root) return go(k + 1);
        for (const auto& p : preds[v]) {
            parent[v] = p;
            if (go(k + 1)) return true;
        }
        parent.erase(v);
        return false;
    };
    if (!go(0)) return std::nullopt;
    return parent;
}

bool is_quasi_tree_like(const Sequent& s) { return quasi_tree_parents(s).has_value(); }

}  // namespace igl
