#include "igl/proof.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace igl {

std::vector<int> tree_parents(const CyclicProof& p) {
    std::vector<int> parent(p.nodes.size(), -1);
    for (int n = 0; n < static_cast<int>(p.nodes.size()); ++n)
        for (int c : p.nodes[n].premisses)
            if (c >= 0 && c < static_cast<int>(p.nodes.size())) parent[c] = n;
    return parent;
}

std::optional<Renaming> complete_renaming(const Sequent& target, const Sequent&,
                                          const Renaming& partial) {
    Renaming out;
    std::set<Label> image;
    LabelSet dom = labels(target);
    for (const auto& u : dom) {
        auto it = partial.find(u);
        if (it != partial.end()) {
            out[u] = it->second;
            if (!image.insert(it->second).second) return std::nullopt;
        }
    }
    for (const auto& u : dom) {
        if (out.count(u)) continue;
        if (!image.insert(u).second) return std::nullopt;
        out[u] = u;
    }
    return out;
}

namespace {

bool needs_principal(Rule r) {
    switch (r) {
        case Rule::id:
        case Rule::botL:
        case Rule::cut:
        case Rule::th:
        case Rule::tr: return false;
        default: return true;
    }
}

}  // namespace

namespace {

std::optional<Position> find_principal(const CyclicProof& p, int id, const std::vector<Sequent>& prem) {
    const ProofNode& nd = p.nodes[id];
    for (Side side : {Side::L, Side::R}) {
        int sz = static_cast<int>(side == Side::L ? nd.sequent.lhs.size() : nd.sequent.rhs.size());
        for (int i = 0; i < sz; ++i)
            if (check_step(*nd.rule, nd.sequent, prem, {{side, i}}, nd.fresh, nd.cut_formula, p.system).ok)
                return Position{side, i};
    }
    return std::nullopt;
}

}  // namespace

void fill_principals(CyclicProof& p) {
    int n = static_cast<int>(p.nodes.size());
    for (int id = 0; id < n; ++id) {
        ProofNode& nd = p.nodes[id];
        if (!nd.rule || !nd.principal.empty() || !needs_principal(*nd.rule)) continue;
        std::vector<Sequent> prem;
        for (int c : nd.premisses) {
            if (c < 0 || c >= n) return;
            prem.push_back(p.nodes[c].sequent);
        }
        if (auto pos = find_principal(p, id, prem)) nd.principal = {*pos};
    }
}

LocalReport check_local(const CyclicProof& p, const LocalOptions& opt) {
    LocalReport rep;
    const int n = static_cast<int>(p.nodes.size());
    auto bad = [&](int id, std::string m) {
        rep.ok = false;
        rep.violations.push_back({id, std::move(m)});
    };
    if (p.root < 0 || p.root >= n) {
        bad(-1, "root out of range");
        return rep;
    }
    std::vector<int> seen(n, 0), tree_in(n, 0);
    std::deque<int> queue{p.root};
    seen[p.root] = 1;
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        const auto& nd = p.nodes[id];
        std::vector<int> next = nd.premisses;
        if (nd.backedge) next.push_back(nd.backedge->target);
        for (int c : next) {
            if (c < 0 || c >= n) continue;
            if (!seen[c]) {
                seen[c] = 1;
                queue.push_back(c);
            }
        }
    }
    for (int id = 0; id < n; ++id) {
        if (!seen[id]) bad(id, "node not reachable from the root");
        for (int c : p.nodes[id].premisses)
            if (c >= 0 && c < n && ++tree_in[c] > 1) bad(c, "node is the premiss of two steps");
    }

    for (int id = 0; id < n; ++id) {
        const ProofNode& nd = p.nodes[id];
        if (auto v = system_violation(nd.sequent, p.system)) bad(id, *v);
        if (nd.backedge) {
            if (nd.rule || !nd.premisses.empty()) bad(id, "back-edge leaf carries a rule");
            int t = nd.backedge->target;
            if (t < 0 || t >= n) {
                bad(id, "back-edge target out of range");
                continue;
            }
            auto sigma = complete_renaming(p.nodes[t].sequent, nd.sequent, nd.backedge->renaming);
            if (!sigma) {
                bad(id, "back-edge renaming is not injective");
                continue;
            }
            Sequent img = rename(p.nodes[t].sequent, *sigma);
            if (!multiset_equal(img.lhs, nd.sequent.lhs) || !multiset_equal(img.rhs, nd.sequent.rhs)) {
                bad(id, "back-edge: sequent differs from the renamed target");
                continue;
            }
            if (img.rel != nd.sequent.rel) {
                bool sub = std::includes(nd.sequent.rel.begin(), nd.sequent.rel.end(),
                                         img.rel.begin(), img.rel.end());
                if (!sub || opt.strict_backedges)
                    bad(id, "back-edge: relational context differs from the renamed target");
                else
                    rep.relaxed_backedges.push_back(id);
            }
            continue;
        }
        if (!nd.rule) {
            bad(id, "open leaf");
            continue;
        }
        std::vector<Sequent> prem;
        bool range_ok = true;
        for (int c : nd.premisses) {
            if (c < 0 || c >= n) {
                range_ok = false;
                break;
            }
            prem.push_back(p.nodes[c].sequent);
        }
        if (!range_ok) {
            bad(id, "premiss id out of range");
            continue;
        }
        StepCheck r = check_step(*nd.rule, nd.sequent, prem, nd.principal, nd.fresh,
                                 nd.cut_formula, p.system);
        if (!r.ok && nd.principal.empty() && needs_principal(*nd.rule))
            if (auto pos = find_principal(p, id, prem)) r = check_step(*nd.rule, nd.sequent, prem, {*pos}, nd.fresh,
                                                                       nd.cut_formula, p.system);
        if (!r.ok)
            bad(id, rule_name(*nd.rule) + ": " + r.message);
        else if (r.generalized)
            rep.generalized.push_back(id);
    }
    return rep;
}

namespace {

void add_edge(std::map<std::pair<Label, Label>, bool>& m, const Label& x, const Label& y, bool prog) {
    auto [it, fresh] = m.emplace(std::make_pair(x, y), prog);
    if (!fresh) it->second = it->second || prog;
}

std::vector<TraceEdge> flatten(const std::map<std::pair<Label, Label>, bool>& m) {
    std::vector<TraceEdge> out;
    out.reserve(m.size());
    for (const auto& [k, v] : m) out.push_back({k.first, k.second, v});
    return out;
}

}  // namespace

TraceRelation edge_trace_relation(const CyclicProof& p, int parent, int child) {
    TraceRelation tr{parent, child, {}};
    const ProofNode& a = p.nodes.at(parent);
    const ProofNode& b = p.nodes.at(child);
    std::map<std::pair<Label, Label>, bool> m;
    if (a.backedge && a.backedge->target == child) {
        auto sigma = complete_renaming(b.sequent, a.sequent, a.backedge->renaming);
        if (!sigma) return tr;
        for (const auto& [u, su] : *sigma) {
            add_edge(m, su, u, false);
            for (const auto& [x, y] : a.sequent.rel)
                if (y == su) add_edge(m, x, u, true);
        }
    } else {
        LabelSet la = labels(a.sequent), lb = labels(b.sequent);
        for (const auto& x : la)
            if (lb.count(x)) add_edge(m, x, x, false);
        for (const auto& [x, y] : a.sequent.rel)
            if (lb.count(y)) add_edge(m, x, y, true);
    }
    tr.edges = flatten(m);
    return tr;
}

TraceRelation compose(const TraceRelation& a, const TraceRelation& b) {
    std::map<std::pair<Label, Label>, bool> m;
    std::multimap<Label, const TraceEdge*> by_src;
    for (const auto& e : b.edges) by_src.emplace(e.x, &e);
    for (const auto& e : a.edges) {
        auto [lo, hi] = by_src.equal_range(e.y);
        for (auto it = lo; it != hi; ++it) add_edge(m, e.x, it->second->y, e.progress || it->second->progress);
    }
    return {a.source, b.target, flatten(m)};
}

namespace {

struct Elem {
    TraceRelation rel;
    std::vector<int> path;
};

bool has_self_progress(const TraceRelation& r) {
    for (const auto& te : r.edges)
        if (te.x == te.y && te.progress) return true;
    return false;
}

bool idempotent(const TraceRelation& r) { return compose(r, r).edges == r.edges; }

// Composition closure of the segment relations between back-edge targets.
std::vector<Elem> trace_closure(const CyclicProof& p) {
    std::set<int> targets;
    for (const auto& nd : p.nodes)
        if (nd.backedge) targets.insert(nd.backedge->target);
    std::vector<Elem> segments;
    for (int t : targets) {
        struct Frame {
            int node;
            TraceRelation rel;
            std::vector<int> path;
        };
        std::vector<Frame> stack;
        auto visit_succ = [&](const Frame& f) {
            const ProofNode& nd = p.nodes[f.node];
            if (nd.backedge) {
                int tgt = nd.backedge->target;
                Elem e{compose(f.rel, edge_trace_relation(p, f.node, tgt)), f.path};
                e.path.push_back(tgt);
                segments.push_back(std::move(e));
                return;
            }
            for (int c : nd.premisses) {
                Frame g{c, compose(f.rel, edge_trace_relation(p, f.node, c)), f.path};
                g.path.push_back(c);
                if (targets.count(c) && !p.nodes[c].backedge) {
                    segments.push_back({std::move(g.rel), std::move(g.path)});
                    continue;
                }
                stack.push_back(std::move(g));
            }
        };
        TraceRelation id{t, t, {}};
        for (const auto& l : labels(p.nodes[t].sequent)) id.edges.push_back({l, l, false});
        visit_succ({t, id, {t}});
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            visit_succ(f);
        }
    }

    auto key = [](const TraceRelation& r) {
        return std::make_tuple(r.source, r.target, r.edges);
    };
    std::set<decltype(key(TraceRelation{}))> seen;
    std::vector<Elem> all;
    std::deque<std::size_t> work;
    for (auto& s : segments) {
        if (seen.insert(key(s.rel)).second) {
            all.push_back(s);
            work.push_back(all.size() - 1);
        }
    }
    std::multimap<int, std::size_t> seg_from;
    for (std::size_t i = 0; i < segments.size(); ++i) seg_from.emplace(segments[i].rel.source, i);
    const std::size_t cap = 500000;
    while (!work.empty()) {
        std::size_t i = work.front();
        work.pop_front();
        auto [lo, hi] = seg_from.equal_range(all[i].rel.target);
        for (auto it = lo; it != hi; ++it) {
            const Elem& g = segments[it->second];
            TraceRelation r = compose(all[i].rel, g.rel);
            if (!seen.insert(key(r)).second) continue;
            Elem e{std::move(r), all[i].path};
            e.path.insert(e.path.end(), g.path.begin() + 1, g.path.end());
            all.push_back(std::move(e));
            work.push_back(all.size() - 1);
            if (all.size() > cap) throw std::runtime_error("trace closure exceeds the size cap");
        }
    }
    return all;
}

// Powers r, r^2, ... up to the first repeat.
std::vector<TraceRelation> powers(const TraceRelation& r) {
    std::vector<TraceRelation> out{r};
    std::set<std::vector<TraceEdge>> seen{r.edges};
    while (true) {
        TraceRelation n = compose(out.back(), r);
        if (!seen.insert(n.edges).second) break;
        out.push_back(std::move(n));
    }
    return out;
}

}  // namespace

ProgressReport check_progress(const CyclicProof& p) {
    ProgressReport rep;
    auto all = trace_closure(p);
    rep.relations = all.size();
    for (const auto& e : all) {
        if (e.rel.source != e.rel.target || !idempotent(e.rel)) continue;
        if (!has_self_progress(e.rel)) {
            rep.progressing = false;
            rep.witness = e.path;
            return rep;
        }
    }
    return rep;
}

bool no_progressing_cycle(const CyclicProof& p, std::vector<int>* witness) {
    for (const auto& e : trace_closure(p)) {
        if (e.rel.source != e.rel.target || !idempotent(e.rel)) continue;
        if (has_self_progress(e.rel)) {
            if (witness) *witness = e.path;
            return false;
        }
    }
    return true;
}

bool cycle_progresses(const TraceRelation& r) {
    for (const auto& q : powers(r))
        if (idempotent(q) && !has_self_progress(q)) return false;
    return true;
}

bool cycle_never_progresses(const TraceRelation& r) {
    for (const auto& q : powers(r))
        if (idempotent(q) && has_self_progress(q)) return false;
    return true;
}

ThinningResult eliminate_thinning(const CyclicProof& p) {
    ThinningResult res;
    const int n = static_cast<int>(p.nodes.size());
    std::vector<int> parent = tree_parents(p);
    // rel' = union of the contexts beneath, over the original tree
    std::vector<RelCtx> grown(n);
    std::vector<int> order;
    {
        std::vector<int> stack{p.root};
        std::vector<int> vis(n, 0);
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            if (vis[id]) continue;
            vis[id] = 1;
            order.push_back(id);
            for (int c : p.nodes[id].premisses) stack.push_back(c);
        }
    }
    for (int id : order) {
        grown[id] = p.nodes[id].sequent.rel;
        if (parent[id] >= 0 && id != p.root)
            grown[id].insert(grown[parent[id]].begin(), grown[parent[id]].end());
    }
    auto resolve = [&](int id) {
        while (p.nodes[id].rule == Rule::th) id = p.nodes[id].premisses.at(0);
        return id;
    };
    std::vector<int> newid(n, -1);
    CyclicProof out;
    out.system = p.system;
    for (int id : order) {
        if (p.nodes[id].rule == Rule::th) {
            ++res.removed;
            continue;
        }
        newid[id] = static_cast<int>(out.nodes.size());
        ProofNode nd = p.nodes[id];
        nd.sequent.rel = grown[id];
        out.nodes.push_back(std::move(nd));
    }
    // th premisses have smaller contexts, so the grown context of the first
    // non-th node above the root equals the root's own
    out.root = newid[resolve(p.root)];
    for (auto& nd : out.nodes) {
        for (int& c : nd.premisses) c = newid[resolve(c)];
        if (nd.backedge) nd.backedge->target = newid[resolve(nd.backedge->target)];
    }
    res.proof = std::move(out);
    LocalReport lr = check_local(res.proof);
    if (!lr.ok) {
        res.ok = false;
        res.error = "node " + std::to_string(lr.violations.front().node) + ": " +
                    lr.violations.front().message;
    }
    return res;
}

std::vector<UnfoldNode> unfold(const CyclicProof& p, int depth) {
    std::vector<UnfoldNode> out;
    const std::size_t cap = 200000;
    int counter = 0;
    Renaming id;
    for (const auto& l : labels(p.conclusion())) id[l] = l;
    out.push_back({p.root, -1, 0, false, p.conclusion(), id, {}});
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].depth >= depth) continue;
        const ProofNode& nd = p.nodes[out[i].origin];
        std::vector<std::pair<int, bool>> next;
        if (nd.backedge)
            next.push_back({nd.backedge->target, true});
        else
            for (int c : nd.premisses) next.push_back({c, false});
        for (auto [c, back] : next) {
            const Sequent& cs = p.nodes[c].sequent;
            Renaming ren;
            if (back) {
                auto sigma = complete_renaming(cs, nd.sequent, nd.backedge->renaming);
                if (!sigma) continue;
                for (const auto& [u, su] : *sigma) {
                    auto it = out[i].renaming.find(su);
                    ren[u] = it == out[i].renaming.end() ? su : it->second;
                }
            } else {
                LabelSet here = labels(nd.sequent);
                std::set<Label> used;
                for (const auto& [k, v] : out[i].renaming) used.insert(v);
                for (const auto& u : labels(cs)) {
                    if (here.count(u)) {
                        ren[u] = out[i].renaming.count(u) ? out[i].renaming.at(u) : u;
                    } else if (!used.count(u)) {
                        ren[u] = u;
                    } else {
                        Label v;
                        do v = u + "_" + std::to_string(counter++);
                        while (used.count(v));
                        ren[u] = v;
                    }
                    used.insert(ren[u]);
                }
            }
            UnfoldNode u{c, static_cast<int>(i), out[i].depth + 1, back, rename(cs, ren), ren, {}};
            out[i].children.push_back(static_cast<int>(out.size()));
            out.push_back(std::move(u));
            if (out.size() > cap) throw std::runtime_error("unfolding exceeds the size cap");
        }
    }
    return out;
}

std::size_t count_backedges(const CyclicProof& p) {
    std::size_t k = 0;
    for (const auto& nd : p.nodes) k += nd.backedge ? 1 : 0;
    return k;
}

bool uses_rule(const CyclicProof& p, Rule r) {
    for (const auto& nd : p.nodes)
        if (nd.rule == r) return true;
    return false;
}

}  // namespace igl
