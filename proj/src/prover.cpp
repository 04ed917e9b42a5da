#include "igl/prover.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <stdexcept>

#include "igl/cutelim.hpp"
#include "json.hpp"

namespace igl {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Provable: return "Provable";
        case Verdict::Refutable: return "Refutable";
        case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::size_t PhaseTree::steps() const {
    std::size_t n = 0;
    for (const auto& nd : nodes)
        if (nd.step) ++n;
    return n;
}

namespace {

bool classical_system(SystemId s) { return s == SystemId::K || s == SystemId::K4; }

std::optional<RuleInstance> tr_instance(const Sequent& s) {
    for (const auto& [x, y] : s.rel)
        for (const auto& [y2, z] : s.rel) {
            if (y2 != y || s.rel.count({x, z})) continue;
            Sequent p = s;
            p.rel.insert({x, z});
            return RuleInstance{Rule::tr, s, {p}, {}, {}, {}, {}};
        }
    return std::nullopt;
}

// Single-succedent invertible steps on the right.
std::optional<RuleInstance> right_invertible(const Sequent& s) {
    if (s.rhs.size() != 1 || !s.rhs.front().labelled()) return std::nullopt;
    const Label& x = s.rhs.front().label();
    Formula f = s.rhs.front().formula();
    Position pos{Side::R, 0};
    auto with = [&](std::vector<DisjFormula> lhs, DisjFormula goal) {
        return Sequent{s.rel, std::move(lhs), {std::move(goal)}};
    };
    auto add = [](std::vector<DisjFormula> side, const DisjFormula& f) {
        if (!contains(side, f)) side.push_back(f);
        return side;
    };
    switch (f->op) {
        case Op::And:
            return RuleInstance{Rule::andR, s, {with(s.lhs, {x, f->a}), with(s.lhs, {x, f->b})}, {pos}, {}, {}, {}};
        case Op::Imp:
            return RuleInstance{Rule::impR, s, {with(add(s.lhs, {x, f->a}), {x, f->b})}, {pos}, {}, {}, {}};
        case Op::Box: {
            Label y = fresh_label(s);
            Sequent p = with(s.lhs, {y, f->a});
            p.rel.insert({x, y});
            return RuleInstance{Rule::boxR, s, {p}, {pos}, y, {}, {}};
        }
        default:
            return std::nullopt;
    }
}

}  // namespace

std::optional<RuleInstance> next_invertible(const Sequent& s, SystemId sys) {
    if (has_tr(sys))
        if (auto t = tr_instance(s)) return t;
    if (single_succedent(sys)) {
        for (auto& r : macro_rules(s, false))
            if (r.principal.front().side == Side::L && r.rule != Rule::macro_impL) return r;
        return right_invertible(s);
    }
    auto ms = macro_rules(s, classical_system(sys));
    if (ms.empty()) return std::nullopt;
    return ms.front();
}

std::optional<PhaseTree> invertible_phase(const Sequent& s, SystemId sys, int max_labels) {
    PhaseTree t;
    t.nodes.push_back({s, {}, {}, false, false});
    std::deque<int> work{0};
    while (!work.empty()) {
        int n = work.front();
        work.pop_front();
        Sequent cur = t.nodes[n].sequent;
        if (static_cast<int>(labels(cur).size()) > max_labels) return std::nullopt;
        if (auto c = closing_rule(cur)) {
            t.nodes[n].closed = true;
            t.nodes[n].step = *c;
            continue;
        }
        auto step = next_invertible(cur, sys);
        if (!step) {
            t.nodes[n].saturated = true;
            continue;
        }
        t.nodes[n].step = *step;
        for (const auto& p : step->premisses) {
            t.nodes.push_back({p, {}, {}, false, false});
            int c = static_cast<int>(t.nodes.size()) - 1;
            t.nodes[n].children.push_back(c);
            work.push_back(c);
        }
    }
    return t;
}

std::vector<RuleInstance> noninvertible_instances(const Sequent& s) {
    std::vector<RuleInstance> out;
    for (int j = 0; j < static_cast<int>(s.rhs.size()); ++j) {
        const auto& d = s.rhs[j];
        if (!d.labelled()) continue;
        const Label& x = d.label();
        Formula f = d.formula();
        Position pos{Side::R, j};
        if (f->op == Op::Imp) {
            Sequent p{s.rel, s.lhs, {DisjFormula(x, f->b)}};
            if (!contains(p.lhs, x, f->a)) p.lhs.push_back({x, f->a});
            out.push_back({Rule::impR, s, {p}, {pos}, {}, {}, {}});
        } else if (f->op == Op::Box) {
            Label y = fresh_label(s);
            Sequent p{s.rel, s.lhs, {DisjFormula(y, f->a)}};
            p.rel.insert({x, y});
            out.push_back({Rule::boxR, s, {p}, {pos}, y, {}, {}});
        }
    }
    return out;
}

std::vector<Sequent> noninvertible_expand(const Sequent& s) {
    std::vector<Sequent> out;
    for (auto& r : noninvertible_instances(s)) out.push_back(r.premisses.front());
    return out;
}

// ---- renamings between sequents

void for_each_embedding(const Sequent& small, const Sequent& big,
                        const std::function<bool(const Renaming&)>& f) {
    LabelSet ls = labels(small), lb = labels(big);
    if (ls.size() > lb.size() || small.rel.size() > big.rel.size() || small.lhs.size() > big.lhs.size() ||
        small.rhs.size() > big.rhs.size())
        return;
    std::vector<Label> order(ls.begin(), ls.end());
    std::vector<Label> cands(lb.begin(), lb.end());
    // formulas indexed by label for early pruning
    std::map<Label, std::vector<std::pair<Formula, bool>>> by_label;
    for (const auto& d : small.lhs)
        if (d.labelled()) by_label[d.label()].push_back({d.formula(), true});
    for (const auto& d : small.rhs)
        if (d.labelled()) by_label[d.label()].push_back({d.formula(), false});
    // degree signature: out, in, lhs, rhs counts per label
    auto signature = [](const Sequent& q) {
        std::map<Label, std::array<int, 4>> sig;
        for (const auto& [a, b] : q.rel) {
            ++sig[a][0];
            ++sig[b][1];
        }
        for (const auto& d : q.lhs)
            for (const auto& lf : d.ds) ++sig[lf.label][2];
        for (const auto& d : q.rhs)
            for (const auto& lf : d.ds) ++sig[lf.label][3];
        return sig;
    };
    auto ss = signature(small), sb = signature(big);
    auto fits = [&](const Label& u, const Label& v) {
        const auto& a = ss[u];
        const auto& b = sb[v];
        for (int i = 0; i < 4; ++i)
            if (a[i] > b[i]) return false;
        return true;
    };
    // Symmetric labels make the search factorial; give up after a fixed
    // amount of work. Callers only lose candidate companions.
    std::size_t budget = 2000;
    Renaming sigma;
    std::set<Label> used;
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
        if (budget == 0) return true;
        --budget;
        if (k == order.size()) {
            Sequent r = rename(small, sigma);
            for (const auto& a : r.rel)
                if (!big.rel.count(a)) return false;
            auto inside = [](std::vector<DisjFormula> s, std::vector<DisjFormula> b) {
                for (const auto& x : s)
                    if (!remove_one(b, x)) return false;
                return true;
            };
            if (!inside(r.lhs, big.lhs) || !inside(r.rhs, big.rhs)) return false;
            return f(sigma);
        }
        const Label& u = order[k];
        for (const auto& v : cands) {
            if (used.count(v) || !fits(u, v)) continue;
            sigma[u] = v;
            bool ok = true;
            for (const auto& [a, b] : small.rel) {
                if (a != u && b != u) continue;
                auto ia = sigma.find(a), ib = sigma.find(b);
                if (ia != sigma.end() && ib != sigma.end() && !big.rel.count({ia->second, ib->second})) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                for (const auto& [g, left] : by_label[u])
                    if (!contains(left ? big.lhs : big.rhs, v, g)) {
                        ok = false;
                        break;
                    }
            if (ok) {
                used.insert(v);
                if (go(k + 1)) return true;
                used.erase(v);
            }
            sigma.erase(u);
        }
        return false;
    };
    go(0);
}

std::optional<Companion> detect_companion(const Sequent& s, const std::vector<Sequent>& history) {
    for (std::size_t i = 0; i < history.size(); ++i) {
        const Sequent& h = history[i];
        if (h.rel.size() != s.rel.size() || h.lhs.size() != s.lhs.size() || h.rhs.size() != s.rhs.size() ||
            labels(h).size() != labels(s).size())
            continue;
        std::optional<Renaming> found;
        for_each_embedding(h, s, [&](const Renaming& r) {
            found = r;
            return true;
        });
        if (found) return Companion{static_cast<int>(i), *found};
    }
    return std::nullopt;
}

// ---- search

namespace {

enum class Res { Proved, Refuted, Unknown };

struct Result {
    Res r;
    int den = -1;       // Denier node when refuted
    bool finite = true; // proved without back-edges
};

class Search {
public:
    Search(const SearchConfig& cfg, SystemId sys)
        : cfg_(cfg), sys_(sys), classical_(classical_system(sys)), single_(single_succedent(sys)) {
        g_.system = sys;
    }

    SearchOutcome run(const Sequent& root) {
        SearchOutcome out;
        int r = add(root);
        Result res = solve(r, 0, true);
        out.stats = stats_;
        out.frontier = frontier_;
        if (res.r == Res::Proved) {
            CyclicProof p = compact(r);
            auto loc = check_local(p);
            if (!loc.ok) {
                out.reason = "assembled certificate fails the local check: " + loc.violations.front().message;
                return out;
            }
            auto pr = check_progress(p);
            if (!pr.progressing) {
                out.reason = "assembled certificate is not progressing";
                return out;
            }
            out.verdict = Verdict::Provable;
            out.proof = std::move(p);
            out.reason = "proof search in " + system_name(sys_);
            return out;
        }
        if (res.r == Res::Refuted && !single_) {
            DenierTree d = compact_denier(res.den);
            if (auto why = validate_denier_tree(d)) {
                out.reason = "Denier tree rejected: " + *why;
                return out;
            }
            out.verdict = Verdict::Refutable;
            out.denier = std::move(d);
            out.reason = "Denier tree in " + system_name(sys_);
            return out;
        }
        if (exhausted_)
            out.reason = "node budget exhausted";
        else if (!frontier_.empty())
            out.reason = "depth or label bound reached";
        else
            out.reason = "no proof found";
        return out;
    }

private:
    const SearchConfig& cfg_;
    SystemId sys_;
    bool classical_, single_;
    CyclicProof g_;
    std::vector<char> sat_;
    std::vector<char> finite_;  // proved and back-edge free, for the global policy
    std::vector<char> anchor_;  // companion candidate: first closed node of a segment, or saturated
    std::vector<int> path_;
    std::vector<DenierNode> den_;
    std::vector<int> den_origin_;
    std::vector<Sequent> frontier_;
    SearchStats stats_;
    bool exhausted_ = false;

    int add(Sequent s) {
        sat_.push_back(0);
        finite_.push_back(0);
        anchor_.push_back(0);
        return g_.add(std::move(s));
    }

    void truncate(std::size_t n) {
        g_.nodes.resize(n);
        sat_.resize(n);
        finite_.resize(n);
        anchor_.resize(n);
    }

    void clear_step(int id) {
        auto& nd = g_.nodes[id];
        nd.rule.reset();
        nd.premisses.clear();
        nd.principal.clear();
        nd.fresh.reset();
        nd.cut_formula.reset();
        nd.backedge.reset();
    }

    void set_step(int id, const RuleInstance& r, std::vector<int> kids) {
        auto& nd = g_.nodes[id];
        nd.rule = r.rule;
        nd.principal = r.principal;
        nd.fresh = r.fresh;
        nd.premisses = std::move(kids);
    }

    int make_den(int id, DenierNode::Kind k, std::optional<Rule> rule, std::vector<int> kids) {
        if (single_) return -1;
        DenierNode d;
        d.sequent = g_.nodes[id].sequent;
        d.kind = k;
        d.rule = rule;
        d.children = std::move(kids);
        den_.push_back(std::move(d));
        den_origin_.push_back(id);
        return static_cast<int>(den_.size()) - 1;
    }

    Result solve(int id, std::size_t phase, bool first) {
        if (++stats_.nodes > cfg_.max_nodes) {
            exhausted_ = true;
            return {Res::Unknown};
        }
        stats_.max_phase_steps = std::max(stats_.max_phase_steps, phase);
        Sequent s = g_.nodes[id].sequent;
        if (auto c = closing_rule(s)) {
            set_step(id, *c, {});
            finite_[id] = 1;
            return {Res::Proved};
        }
        if (static_cast<int>(path_.size()) >= cfg_.max_depth ||
            static_cast<int>(labels(s).size()) > cfg_.max_labels) {
            frontier_.push_back(s);
            return {Res::Unknown};
        }
        path_.push_back(id);
        Result r = expand(id, s, phase, first);
        path_.pop_back();
        return r;
    }

    Result expand(int id, const Sequent& s, std::size_t phase, bool first) {
        bool closed_rel = !has_tr(sys_) || transitive_closure(s.rel) == s.rel;
        auto companion = [&]() -> std::optional<Result> {
            anchor_[id] = 1;
            if (try_companion(id, s)) return Result{Res::Proved, -1, false};
            if (single_ && repeats_ancestor(s)) return Result{Res::Refuted};
            return std::nullopt;
        };
        // classical search never leaves the invertible phase, so every
        // closed node is a candidate
        if (closed_rel && (first || classical_))
            if (auto r = companion()) return *r;
        if (auto inv = next_invertible(s, sys_)) return and_step(id, *inv, phase + 1, first && !closed_rel);
        sat_[id] = 1;
        if (!first)
            if (auto r = companion()) return *r;
        if (classical_) return {Res::Refuted, make_den(id, DenierNode::Kind::Saturated, {}, {})};
        if (single_) return ik4_choices(id, s);
        if (auto l = denier_loop(id, s)) return *l;
        return noninvertible(id, s);
    }

    Result and_step(int id, const RuleInstance& inst, std::size_t phase, bool first) {
        set_step(id, inst, {});
        bool unknown = false, finite = true;
        for (const auto& p : inst.premisses) {
            int c = add(p);
            g_.nodes[id].premisses.push_back(c);
            Result r = solve(c, phase, first);
            if (r.r == Res::Refuted)
                return {Res::Refuted, make_den(id, DenierNode::Kind::Step, inst.rule, {r.den})};
            if (r.r == Res::Unknown) unknown = true;
            finite = finite && r.finite;
        }
        if (unknown) return {Res::Unknown};
        finite_[id] = finite;
        return {Res::Proved, -1, finite};
    }

    Result noninvertible(int id, const Sequent& s) {
        std::vector<int> dens;
        bool unknown = false;
        for (const auto& inst : noninvertible_instances(s)) {
            int c = add(inst.premisses.front());
            Result r = solve(c, 0, true);
            if (r.r == Res::Proved) {
                set_step(id, inst, {c});
                finite_[id] = r.finite;
                return {Res::Proved, -1, r.finite};
            }
            if (r.r == Res::Refuted)
                dens.push_back(r.den);
            else
                unknown = true;
        }
        if (unknown) return {Res::Unknown};
        return {Res::Refuted, make_den(id, DenierNode::Kind::Saturated, {}, std::move(dens))};
    }

    // Non-invertible IK4 choices: orR, diaR and impL.
    Result ik4_choices(int id, const Sequent& s) {
        std::vector<RuleInstance> choices;
        if (s.rhs.size() == 1 && s.rhs.front().labelled()) {
            const Label& x = s.rhs.front().label();
            Formula f = s.rhs.front().formula();
            Position pos{Side::R, 0};
            if (f->op == Op::Or) {
                choices.push_back({Rule::orR, s, {{s.rel, s.lhs, {DisjFormula(x, f->a)}}}, {pos}, {}, {}, {}});
                choices.push_back({Rule::orR, s, {{s.rel, s.lhs, {DisjFormula(x, f->b)}}}, {pos}, {}, {}, {}});
            } else if (f->op == Op::Dia) {
                for (const auto& y : labels(s))
                    if (s.rel.count({x, y}))
                        choices.push_back({Rule::diaR, s, {{s.rel, s.lhs, {DisjFormula(y, f->a)}}}, {pos}, {}, y, {}});
            }
        }
        for (int i = 0; i < static_cast<int>(s.lhs.size()); ++i) {
            const auto& d = s.lhs[i];
            if (!d.labelled() || d.formula()->op != Op::Imp) continue;
            const Label& x = d.label();
            Formula f = d.formula();
            if (contains(s.lhs, x, f->b)) continue;
            Sequent left{s.rel, s.lhs, {DisjFormula(x, f->a)}};
            Sequent right{s.rel, s.lhs, s.rhs};
            right.lhs.push_back({x, f->b});
            choices.push_back({Rule::impL, s, {left, right}, {{Side::L, i}}, {}, {}, {}});
        }
        bool unknown = false;
        for (const auto& ch : choices) {
            std::vector<int> kids;
            bool ok = true, finite = true;
            for (const auto& p : ch.premisses) {
                int c = add(p);
                kids.push_back(c);
                Result r = solve(c, 0, true);
                if (r.r != Res::Proved) {
                    ok = false;
                    if (r.r == Res::Unknown) unknown = true;
                    break;
                }
                finite = finite && r.finite;
            }
            if (ok) {
                set_step(id, ch, kids);
                finite_[id] = finite;
                return {Res::Proved, -1, finite};
            }
            if (exhausted_) break;
        }
        return {unknown ? Res::Unknown : Res::Refuted};
    }

    // Trace relations from each path position to the current node.
    std::vector<TraceRelation> suffix_relations(const Sequent& s) {
        std::size_t n = path_.size();
        std::vector<TraceRelation> rel(n);
        TraceRelation id{path_.back(), path_.back(), {}};
        for (const auto& l : labels(s)) id.edges.push_back({l, l, false});
        rel[n - 1] = id;
        for (std::size_t k = n - 1; k-- > 0;)
            rel[k] = compose(edge_trace_relation(g_, path_[k], path_[k + 1]), rel[k + 1]);
        return rel;
    }

    // Weakens the node at `id` down to `target` and closes with a back-edge.
    // Returns the back-edge node.
    int build_chain(int id, const Sequent& target, int to, const Renaming& sigma) {
        int cur = id;
        Sequent cs = g_.nodes[id].sequent;
        auto step = [&](Rule r, Sequent next, std::vector<Position> pr) {
            int c = add(next);
            auto& nd = g_.nodes[cur];
            nd.rule = r;
            nd.principal = std::move(pr);
            nd.premisses = {c};
            cur = c;
            cs = std::move(next);
        };
        if (cs.rel != target.rel) step(Rule::th, Sequent{target.rel, cs.lhs, cs.rhs}, {});
        auto excess = [](const std::vector<DisjFormula>& have, const std::vector<DisjFormula>& want) -> int {
            for (int i = 0; i < static_cast<int>(have.size()); ++i) {
                auto h = std::count(have.begin(), have.end(), have[i]);
                auto w = std::count(want.begin(), want.end(), have[i]);
                if (h > w) return i;
            }
            return -1;
        };
        for (int i; (i = excess(cs.lhs, target.lhs)) >= 0;) {
            Sequent n = cs;
            n.lhs.erase(n.lhs.begin() + i);
            step(Rule::wL, n, {{Side::L, i}});
        }
        for (int i; (i = excess(cs.rhs, target.rhs)) >= 0;) {
            Sequent n = cs;
            n.rhs.erase(n.rhs.begin() + i);
            step(Rule::wR, n, {{Side::R, i}});
        }
        g_.nodes[cur].backedge = BackEdge{to, sigma};
        return cur;
    }

    bool try_companion(int id, const Sequent& s) {
        std::size_t n = path_.size();
        if (n < 2 && cfg_.companion_policy == CompanionPolicy::ancestors_only) return false;
        std::optional<std::vector<TraceRelation>> rel;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            int a = path_[k];
            if (!anchor_[a]) continue;
            const Sequent target_seq = g_.nodes[a].sequent;
            int tried = 0;
            bool done = false;
            for_each_embedding(target_seq, s, [&](const Renaming& sigma) {
                // the identity never progresses: rel is acyclic
                bool identity = std::all_of(sigma.begin(), sigma.end(), [](const auto& kv) { return kv.first == kv.second; });
                if (identity) return false;
                ++stats_.companions_tried;
                if (++tried > 16) return true;
                if (!rel) rel = suffix_relations(s);
                std::size_t mark = g_.nodes.size();
                int b = build_chain(id, rename(target_seq, sigma), a, sigma);
                TraceRelation r = (*rel)[k];
                for (int cur = id; cur != b; cur = g_.nodes[cur].premisses.front())
                    r = compose(r, edge_trace_relation(g_, cur, g_.nodes[cur].premisses.front()));
                r = compose(r, edge_trace_relation(g_, b, a));
                if (cycle_progresses(r)) {
                    done = true;
                    return true;
                }
                truncate(mark);
                clear_step(id);
                return false;
            });
            if (done) return true;
        }
        if (cfg_.companion_policy == CompanionPolicy::global) {
            // reuse a finished finite subproof of an equal sequent
            for (int t = 0; t < static_cast<int>(g_.nodes.size()); ++t) {
                if (!finite_[t] || t == id || !same_sequent(g_.nodes[t].sequent, s)) continue;
                g_.nodes[id].backedge = BackEdge{t, {}};
                return true;
            }
        }
        return false;
    }

    bool repeats_ancestor(const Sequent& s) {
        std::vector<Sequent> hist;
        for (std::size_t k = 0; k + 1 < path_.size(); ++k)
            if (anchor_[path_[k]]) hist.push_back(g_.nodes[path_[k]].sequent);
        return detect_companion(s, hist).has_value();
    }

    std::optional<Result> denier_loop(int id, const Sequent& s) {
        std::optional<std::vector<TraceRelation>> rel;
        for (std::size_t k = 0; k + 1 < path_.size(); ++k) {
            int a = path_[k];
            if (!sat_[a]) continue;
            const Sequent& t = g_.nodes[a].sequent;
            if (t.rel.size() != s.rel.size() || t.lhs.size() != s.lhs.size() || t.rhs.size() != s.rhs.size())
                continue;
            std::optional<Renaming> hit;
            for_each_embedding(t, s, [&](const Renaming& sigma) {
                if (!rel) rel = suffix_relations(s);
                g_.nodes[id].backedge = BackEdge{a, sigma};
                TraceRelation r = compose((*rel)[k], edge_trace_relation(g_, id, a));
                g_.nodes[id].backedge.reset();
                if (cycle_never_progresses(r)) {
                    hit = sigma;
                    return true;
                }
                return false;
            });
            if (hit) {
                int d = make_den(id, DenierNode::Kind::Loop, {}, {});
                den_[d].loop_target = a;  // resolved to a Denier index on compaction
                den_[d].loop_renaming = *hit;
                return Result{Res::Refuted, d};
            }
        }
        return std::nullopt;
    }

    CyclicProof compact(int root) const {
        std::map<int, int> ids;
        std::vector<int> order;
        std::deque<int> work{root};
        ids[root] = 0;
        order.push_back(root);
        while (!work.empty()) {
            int n = work.front();
            work.pop_front();
            const auto& nd = g_.nodes[n];
            std::vector<int> next = nd.premisses;
            if (nd.backedge) next.push_back(nd.backedge->target);
            for (int c : next)
                if (!ids.count(c)) {
                    ids[c] = static_cast<int>(order.size());
                    order.push_back(c);
                    work.push_back(c);
                }
        }
        CyclicProof p;
        p.system = sys_;
        p.root = 0;
        for (int n : order) {
            ProofNode nd = g_.nodes[n];
            for (int& c : nd.premisses) c = ids.at(c);
            if (nd.backedge) nd.backedge->target = ids.at(nd.backedge->target);
            p.nodes.push_back(std::move(nd));
        }
        return p;
    }

    DenierTree compact_denier(int root) const {
        std::map<int, int> ids;
        std::vector<int> order{root};
        ids[root] = 0;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (int c : den_[order[i]].children)
                if (!ids.count(c)) {
                    ids[c] = static_cast<int>(order.size());
                    order.push_back(c);
                }
        std::map<int, int> by_origin;
        for (int d : order) by_origin[den_origin_[d]] = ids[d];
        DenierTree t;
        t.system = sys_;
        for (int d : order) {
            DenierNode nd = den_[d];
            for (int& c : nd.children) c = ids.at(c);
            if (nd.kind == DenierNode::Kind::Loop) {
                auto it = by_origin.find(nd.loop_target);
                nd.loop_target = it == by_origin.end() ? -1 : it->second;
            }
            t.nodes.push_back(std::move(nd));
        }
        return t;
    }
};

}  // namespace

SearchOutcome prove_sequent(const Sequent& s, const SearchConfig& cfg) {
    if (cfg.max_labels < 1 || cfg.max_depth < 1 || cfg.max_nodes < 1)
        throw std::invalid_argument("search bounds must be at least 1");
    if (cfg.system == SystemId::dIK4) throw std::invalid_argument("proof search does not run in dIK4");
    if (cfg.system == SystemId::IK) throw std::invalid_argument("proof search does not run in IK");
    Search search(cfg, cfg.system);
    return search.run(s);
}

SearchOutcome prove(Formula f, const SearchConfig& cfg) {
    if (cfg.system == SystemId::IK4) return prove_igl(f, cfg);
    return prove_sequent(Sequent{{}, {}, {DisjFormula(kRootLabel, f)}}, cfg);
}

SearchOutcome prove_igl(Formula f, const SearchConfig& cfg) {
    Sequent goal{{}, {}, {DisjFormula(kRootLabel, f)}};
    SearchConfig m = cfg;
    m.system = SystemId::mIK4;
    SearchOutcome multi = prove_sequent(goal, m);
    if (multi.verdict == Verdict::Refutable) {
        multi.reason = "refuted by the mIK4 Denier tree";
        return multi;
    }
    SearchConfig d = cfg;
    d.system = SystemId::IK4;
    SearchOutcome direct = prove_sequent(goal, d);
    direct.stats.nodes += multi.stats.nodes;
    if (direct.verdict == Verdict::Provable) return direct;
    if (multi.verdict == Verdict::Provable && cfg.allow_cut_fallback) {
        std::string why;
        if (auto p = ik4_from_mik4(*multi.proof, 12, &why)) {
            direct.verdict = Verdict::Provable;
            direct.proof = std::move(*p);
            direct.reason = "mIK4 proof reduced to degree 1";
            return direct;
        }
        direct.reason = "mIK4 proves it but IK4 search failed and cut reduction did not close: " + why;
        return direct;
    }
    if (multi.verdict == Verdict::Unknown) direct.reason = "mIK4: " + multi.reason + "; IK4: " + direct.reason;
    return direct;
}

// ---- Denier trees

CyclicProof denier_graph(const DenierTree& d) {
    CyclicProof p;
    p.system = d.system;
    p.root = d.root;
    for (const auto& n : d.nodes) {
        ProofNode pn;
        pn.sequent = n.sequent;
        pn.premisses = n.children;
        if (n.kind == DenierNode::Kind::Loop) pn.backedge = BackEdge{n.loop_target, n.loop_renaming};
        p.nodes.push_back(std::move(pn));
    }
    return p;
}

std::optional<std::string> validate_denier_tree(const DenierTree& d) {
    int n = static_cast<int>(d.nodes.size());
    if (d.root < 0 || d.root >= n) return "root out of range";
    std::vector<int> parent(n, -1);
    for (int i = 0; i < n; ++i)
        for (int c : d.nodes[i].children) {
            if (c < 0 || c >= n) return "child out of range at node " + std::to_string(i);
            if (parent[c] >= 0 || c == d.root) return "node " + std::to_string(c) + " has two parents";
            parent[c] = i;
        }
    for (int i = 0; i < n; ++i) {
        const auto& nd = d.nodes[i];
        std::string at = " at node " + std::to_string(i);
        if (closing_rule(nd.sequent)) return "initial sequent" + at;
        auto inv = next_invertible(nd.sequent, d.system);
        switch (nd.kind) {
            case DenierNode::Kind::Step: {
                if (!inv) return "Step node is saturated" + at;
                if (nd.children.size() != 1) return "Step node needs one child" + at;
                bool found = false;
                for (const auto& p : inv->premisses)
                    if (same_sequent(p, d.nodes[nd.children[0]].sequent)) found = true;
                if (!found) return "child is not a premiss of the invertible step" + at;
                break;
            }
            case DenierNode::Kind::Saturated: {
                if (inv) return "node is not saturated" + at;
                auto succ = classical_system(d.system) ? std::vector<Sequent>{} : noninvertible_expand(nd.sequent);
                if (succ.size() != nd.children.size()) return "missing non-invertible successors" + at;
                for (std::size_t k = 0; k < succ.size(); ++k)
                    if (!same_sequent(succ[k], d.nodes[nd.children[k]].sequent))
                        return "successor mismatch" + at;
                break;
            }
            case DenierNode::Kind::Loop: {
                if (inv) return "loop node is not saturated" + at;
                int t = nd.loop_target;
                if (t < 0 || t >= n) return "loop target out of range" + at;
                bool anc = false;
                for (int a = parent[i]; a >= 0; a = parent[a])
                    if (a == t) anc = true;
                if (!anc) return "loop target is not an ancestor" + at;
                if (!same_sequent(rename(d.nodes[t].sequent, nd.loop_renaming), nd.sequent))
                    return "loop sequents differ" + at;
                break;
            }
        }
    }
    std::vector<int> w;
    if (!no_progressing_cycle(denier_graph(d), &w)) return "a loop carries a progressing trace";
    return std::nullopt;
}

namespace {

std::string kind_name(DenierNode::Kind k) {
    switch (k) {
        case DenierNode::Kind::Step: return "step";
        case DenierNode::Kind::Saturated: return "saturated";
        case DenierNode::Kind::Loop: return "loop";
    }
    return "step";
}

}  // namespace

std::string denier_to_json(const DenierTree& d, bool pretty) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["system"] = system_name(d.system);
    j["root"] = d.root;
    ordered_json nodes = ordered_json::array();
    for (int i = 0; i < static_cast<int>(d.nodes.size()); ++i) {
        const auto& nd = d.nodes[i];
        ordered_json n;
        n["id"] = i;
        n["sequent"] = render_sequent(nd.sequent);
        n["kind"] = kind_name(nd.kind);
        if (nd.rule) n["rule"] = rule_name(*nd.rule);
        n["children"] = nd.children;
        if (nd.kind == DenierNode::Kind::Loop) {
            ordered_json ren = ordered_json::object();
            for (const auto& [a, b] : nd.loop_renaming) ren[a] = b;
            n["loop"] = {{"target", nd.loop_target}, {"renaming", ren}};
        }
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    return pretty ? j.dump(2) : j.dump();
}

DenierTree denier_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    DenierTree d;
    d.system = parse_system(j.at("system").get<std::string>());
    d.root = j.at("root").get<int>();
    for (const auto& n : j.at("nodes")) {
        DenierNode nd;
        nd.sequent = parse_sequent(n.at("sequent").get<std::string>());
        std::string k = n.value("kind", "saturated");
        nd.kind = k == "step" ? DenierNode::Kind::Step
                : k == "loop" ? DenierNode::Kind::Loop
                              : DenierNode::Kind::Saturated;
        if (n.contains("rule")) nd.rule = parse_rule(n["rule"].get<std::string>());
        if (n.contains("children")) nd.children = n["children"].get<std::vector<int>>();
        if (n.contains("loop")) {
            nd.loop_target = n["loop"].at("target").get<int>();
            if (n["loop"].contains("renaming"))
                for (const auto& [a, b] : n["loop"]["renaming"].items()) nd.loop_renaming[a] = b.get<std::string>();
        }
        d.nodes.push_back(std::move(nd));
    }
    return d;
}

}  // namespace igl
