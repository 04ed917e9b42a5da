#include "igl/cutelim.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "igl/prover.hpp"

namespace igl {

namespace {

using Side_ = std::vector<DisjFormula>;
using Repl = std::map<DisjFormula, DisjFormula>;

DisjFormula disj_of(const Side_& side) {
    std::vector<LabelledFormula> ds;
    for (const auto& f : side)
        for (const auto& d : f.ds)
            if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
    return DisjFormula(std::move(ds));
}

bool has_disjunct(const DisjFormula& f, const LabelledFormula& d) {
    return std::find(f.ds.begin(), f.ds.end(), d) != f.ds.end();
}

bool sub_disj(const DisjFormula& small, const DisjFormula& big) {
    for (const auto& d : small.ds)
        if (!has_disjunct(big, d)) return false;
    return !small.ds.empty();
}

Side_ dedup(const Side_& v) {
    Side_ out;
    for (const auto& f : v)
        if (!contains(out, f)) out.push_back(f);
    return out;
}

int index_of(const Side_& side, const DisjFormula& f) {
    auto it = std::find(side.begin(), side.end(), f);
    return it == side.end() ? -1 : static_cast<int>(it - side.begin());
}

ProofNode node(Sequent s, Rule r, std::vector<int> prem = {}, std::vector<Position> pr = {},
               std::optional<Label> fresh = {}, std::optional<DisjFormula> cutf = {}) {
    return {std::move(s), r, std::move(prem), std::move(pr), std::move(fresh), std::move(cutf), {}};
}

Sequent cut_conclusion(const Sequent& a, const Sequent& b, const DisjFormula& phi) {
    Sequent c;
    c.rel = a.rel;
    Side_ bl = b.lhs, ar = a.rhs;
    remove_one(bl, phi);
    remove_one(ar, phi);
    Side_ l = a.lhs;
    l.insert(l.end(), bl.begin(), bl.end());
    c.lhs = dedup(l);
    c.rhs = b.rhs;
    for (const auto& f : ar)
        if (!contains(c.rhs, f)) c.rhs.push_back(f);
    return c;
}

Renaming must_complete(const Sequent& target, const Sequent& here, const Renaming& partial) {
    auto s = complete_renaming(target, here, partial);
    if (!s) throw CutError("back-edge renaming is not injective");
    return *s;
}

// ---- embedding

class Embedder {
public:
    explicit Embedder(const CyclicProof& p) : p_(p) {
        fill_principals(p_);
        out_.system = SystemId::dIK4;
    }

    CyclicProof run() {
        int n = static_cast<int>(p_.nodes.size());
        for (const auto& nd : p_.nodes)
            if (nd.rule == Rule::cut) throw CutError("embedding expects a cut-free proof");
        phi_.assign(n, std::nullopt);
        tr_.assign(n, -1);
        for (int i = 0; i < n; ++i) phi_of(i, 0);
        out_.root = translate(p_.root);
        for (auto [leaf, orig] : fixups_) out_.nodes[leaf].backedge->target = tr_.at(orig);
        return out_;
    }

private:
    CyclicProof p_;
    CyclicProof out_;
    std::vector<std::optional<DisjFormula>> phi_;
    std::vector<int> tr_;
    std::vector<std::pair<int, int>> fixups_;

    const DisjFormula& phi_of(int id, int depth) {
        if (phi_[id]) return *phi_[id];
        const ProofNode& nd = p_.nodes[id];
        if (nd.backedge && depth < 64) {
            const ProofNode& t = p_.nodes.at(nd.backedge->target);
            Renaming s = must_complete(t.sequent, nd.sequent, nd.backedge->renaming);
            phi_[id] = rename(phi_of(nd.backedge->target, depth + 1), s);
        } else {
            if (nd.sequent.rhs.empty()) throw CutError("embedding needs a formula on the right");
            phi_[id] = disj_of(nd.sequent.rhs);
        }
        return *phi_[id];
    }

    int add(ProofNode n) {
        out_.nodes.push_back(std::move(n));
        return static_cast<int>(out_.nodes.size()) - 1;
    }
    const Sequent& seq(int id) const { return out_.nodes[id].sequent; }

    // From a proof of  R, G => chi  with chi inside phi to  R, G => phi.
    int weaken(int m, const DisjFormula& phi) {
        const Sequent& s = seq(m);
        const DisjFormula& chi = s.rhs.at(0);
        if (chi == phi) return m;
        if (!sub_disj(chi, phi)) throw CutError("right side is not a sub-disjunction");
        Sequent c{s.rel, s.lhs, {phi}};
        return add(node(c, Rule::dis_orR, {m}, {{Side::R, 0}}));
    }

    // R, G => d  for d in G, by expanding d down to atoms.
    int identity(const RelCtx& R, const Side_& G, const LabelledFormula& d) {
        Sequent s{R, G, {DisjFormula(d)}};
        const Label& x = d.label;
        Formula f = d.formula;
        auto with = [&](Side_ g, std::initializer_list<DisjFormula> add_) {
            for (const auto& a : add_) g.push_back(a);
            return g;
        };
        int pl = index_of(G, DisjFormula(d));
        switch (f->op) {
            case Op::Atom: return add(node(s, Rule::id));
            case Op::Bot: return add(node(s, Rule::botL));
            case Op::And: {
                Side_ g = with(G, {DisjFormula(x, f->a), DisjFormula(x, f->b)});
                int a = identity(R, g, {x, f->a}), b = identity(R, g, {x, f->b});
                int r = add(node({R, g, {DisjFormula(d)}}, Rule::andR, {a, b}, {{Side::R, 0}}));
                return add(node(s, Rule::andL, {r}, {{Side::L, pl}}));
            }
            case Op::Or: {
                Side_ g0 = with(G, {DisjFormula(x, f->a)}), g1 = with(G, {DisjFormula(x, f->b)});
                int a = add(node({R, g0, {DisjFormula(d)}}, Rule::orR, {identity(R, g0, {x, f->a})},
                                 {{Side::R, 0}}));
                int b = add(node({R, g1, {DisjFormula(d)}}, Rule::orR, {identity(R, g1, {x, f->b})},
                                 {{Side::R, 0}}));
                return add(node(s, Rule::orL, {a, b}, {{Side::L, pl}}));
            }
            case Op::Imp: {
                Side_ g = with(G, {DisjFormula(x, f->a)});
                Side_ gb = with(g, {DisjFormula(x, f->b)});
                int a = identity(R, g, {x, f->a});
                int b = identity(R, gb, {x, f->b});
                int l = add(node({R, g, {DisjFormula(x, f->b)}}, Rule::impL, {a, b},
                                 {{Side::L, index_of(g, DisjFormula(d))}}));
                return add(node(s, Rule::impR, {l}, {{Side::R, 0}}));
            }
            case Op::Box: {
                Label y = fresh_label(s);
                RelCtx R2 = R;
                R2.insert({x, y});
                Side_ g = with(G, {DisjFormula(y, f->a)});
                int i = identity(R2, g, {y, f->a});
                int l = add(node({R2, G, {DisjFormula(y, f->a)}}, Rule::boxL, {i},
                                 {{Side::L, pl}}));
                return add(node(s, Rule::boxR, {l}, {{Side::R, 0}}, y));
            }
            case Op::Dia: {
                Label y = fresh_label(s);
                RelCtx R2 = R;
                R2.insert({x, y});
                Side_ g = G;
                g.erase(g.begin() + pl);
                g.push_back(DisjFormula(y, f->a));
                int i = identity(R2, g, {y, f->a});
                int r = add(node({R2, g, {DisjFormula(d)}}, Rule::diaR, {i}, {{Side::R, 0}}));
                return add(node(s, Rule::diaL, {r}, {{Side::L, pl}}, y));
            }
        }
        throw CutError("identity: unknown connective");
    }

    bool valid(const ProofNode& n) const {
        std::vector<Sequent> prem;
        for (int c : n.premisses) prem.push_back(seq(c));
        return check_step(*n.rule, n.sequent, prem, n.principal, n.fresh, n.cut_formula, SystemId::dIK4).ok;
    }

    int translate(int id) {
        const ProofNode nd = p_.nodes[id];
        const Sequent& S = nd.sequent;
        const DisjFormula& phi = *phi_[id];
        Sequent T{S.rel, S.lhs, {phi}};
        if (nd.backedge) {
            ProofNode leaf{T, {}, {}, {}, {}, {}, BackEdge{-1, nd.backedge->renaming}};
            int l = add(leaf);
            fixups_.push_back({l, nd.backedge->target});
            return tr_[id] = l;
        }
        if (!nd.rule) throw CutError("open leaf in the input");
        Rule r = *nd.rule;
        if (r == Rule::id) {
            for (const auto& f : S.lhs)
                if (f.labelled() && f.formula()->op == Op::Atom && contains(S.rhs, f))
                    return tr_[id] = weaken(add(node({S.rel, S.lhs, {f}}, Rule::id)), phi);
            throw CutError("id without a shared atom");
        }
        if (r == Rule::botL) return tr_[id] = add(node(T, Rule::botL));

        std::vector<int> M;
        for (int c : nd.premisses) M.push_back(translate(c));

        // the step as it stands, when it is already single-succedent
        std::optional<std::vector<Position>> pr = nd.principal;
        for (auto& pos : *pr) {
            if (pos.side != Side::R) continue;
            const DisjFormula& f = S.rhs.at(pos.index);
            if (phi == f)
                pos.index = 0;
            else
                pr.reset();
            if (!pr) break;
        }
        if (pr) {
            ProofNode direct = node(T, r, M, *pr, nd.fresh);
            if (valid(direct)) return tr_[id] = add(direct);
        }

        auto inside = [&](int m) {
            const DisjFormula& chi = seq(m).rhs.at(0);
            for (const auto& d : chi.ds)
                if (!has_disjunct(phi, d)) return false;
            return true;
        };
        bool right = !nd.principal.empty() && nd.principal.front().side == Side::R;
        if (r == Rule::wR || r == Rule::cR) return tr_[id] = weaken(M.at(0), phi);
        for (int m : M) {
            const Sequent& s = seq(m);
            if (right && inside(m) && s.rel == S.rel && multiset_equal(s.lhs, S.lhs))
                return tr_[id] = weaken(m, phi);
        }
        std::vector<int> ext;
        for (std::size_t i = 0; i < M.size(); ++i)
            if (!inside(M[i])) ext.push_back(static_cast<int>(i));
        if (r == Rule::impR || r == Rule::boxR) {
            const Sequent& s = seq(M.at(0));
            if (s.rhs.at(0).degree() != 1) throw CutError(rule_name(r) + " keeps context on the right");
            const DisjFormula& pi = S.rhs.at(nd.principal.at(0).index);
            ProofNode step = node({S.rel, S.lhs, {pi}}, r, {M[0]}, {{Side::R, 0}}, nd.fresh);
            if (!valid(step)) throw CutError("cannot translate " + rule_name(r) + " step");
            return tr_[id] = weaken(add(step), phi);
        }
        if (ext.empty()) {
            std::vector<int> prem;
            for (int m : M) prem.push_back(weaken(m, phi));
            ProofNode step = node(T, r, prem, nd.principal, nd.fresh);
            if (!valid(step)) throw CutError("cannot translate " + rule_name(r) + " step");
            return tr_[id] = add(step);
        }
        for (int i : ext)
            if (seq(M[i]).rel != S.rel || !subset_of(seq(M[i]).lhs, S.lhs))
                throw CutError("cannot simulate " + rule_name(r) + " with cuts");

        // cut on the premiss disjunctions, then decompose them on the left
        Side_ G = S.lhs;
        std::vector<DisjFormula> pending;
        for (int i : ext) {
            pending.push_back(seq(M[i]).rhs.at(0));
            G.push_back(pending.back());
        }
        int z = decompose(S, nd, M, ext, phi, G, pending, {});
        for (int k = static_cast<int>(ext.size()) - 1; k >= 0; --k) {
            Side_ g(S.lhs);
            for (int j = 0; j < k; ++j) g.push_back(pending[j]);
            z = add(node({S.rel, g, {phi}}, Rule::cut, {M[ext[k]], z}, {}, {}, pending[k]));
        }
        return tr_[id] = z;
    }

    int decompose(const Sequent& S, const ProofNode& nd, const std::vector<int>& M,
                  const std::vector<int>& ext, const DisjFormula& phi, const Side_& G,
                  std::vector<DisjFormula> pending, std::vector<LabelledFormula> chosen) {
        Sequent here{S.rel, G, {phi}};
        if (pending.empty()) return close_leaf(S, nd, M, ext, phi, G, chosen);
        DisjFormula psi = pending.front();
        pending.erase(pending.begin());
        if (psi.labelled()) {
            chosen.push_back(psi.lf());
            return decompose(S, nd, M, ext, phi, G, pending, chosen);
        }
        DisjFormula a(std::vector<LabelledFormula>{psi.ds.front()});
        DisjFormula b(std::vector<LabelledFormula>(psi.ds.begin() + 1, psi.ds.end()));
        int pos = index_of(G, psi);
        std::vector<int> prem;
        for (const auto& part : {a, b}) {
            Side_ g = G;
            g.erase(g.begin() + pos);
            g.push_back(part);
            auto pend = pending;
            pend.insert(pend.begin(), part);
            prem.push_back(decompose(S, nd, M, ext, phi, g, pend, chosen));
        }
        return add(node(here, Rule::dis_orL, prem, {{Side::L, pos}}));
    }

    int close_leaf(const Sequent& S, const ProofNode& nd, const std::vector<int>& M,
                   const std::vector<int>& ext, const DisjFormula& phi, const Side_& G,
                   const std::vector<LabelledFormula>& chosen) {
        for (const auto& d : chosen)
            if (has_disjunct(phi, d)) return weaken(identity(S.rel, G, d), phi);
        Rule r = *nd.rule;
        Position pp = nd.principal.at(0);
        if (pp.side == Side::R) {
            if (ext.size() != nd.premisses.size()) throw CutError("mixed premisses in a right rule");
            const DisjFormula& pi = S.rhs.at(pp.index);
            std::vector<int> prem;
            for (const auto& d : chosen) prem.push_back(identity(S.rel, G, d));
            Rule rr = r == Rule::macro_diaR ? Rule::diaR : r;
            ProofNode step = node({S.rel, G, {pi}}, rr, prem, {{Side::R, 0}});
            if (!valid(step)) throw CutError("cannot close the " + rule_name(r) + " simulation");
            return weaken(add(step), phi);
        }
        if ((r == Rule::impL || r == Rule::macro_impL) && ext.size() == 1 && ext[0] == 0) {
            const DisjFormula& pf = S.lhs.at(pp.index);
            int a = identity(S.rel, G, chosen.at(0));
            int b = weaken(M.at(1), phi);
            ProofNode step = node({S.rel, G, {phi}}, Rule::impL, {a, b}, {{Side::L, index_of(G, pf)}});
            if (!valid(step)) throw CutError("cannot close the impL simulation");
            return add(step);
        }
        throw CutError("cannot simulate " + rule_name(r));
    }
};

// ---- working graph: an unfolded tree beneath stubs, which are back-edge
// leaves into the frozen graph; frozen nodes are never rewritten

struct Work {
    CyclicProof g;
    std::vector<char> frozen;
    LabelSet used;
    int counter = 0;

    Work() = default;

    // frozen copy of p under a stub root
    explicit Work(const CyclicProof& p) {
        g = p;
        fill_principals(g);
        frozen.assign(p.nodes.size(), 1);
        for (const auto& nd : p.nodes)
            for (const auto& l : labels(nd.sequent)) used.insert(l);
        Renaming id;
        for (const auto& l : labels(p.conclusion())) id[l] = l;
        ProofNode stub{p.conclusion(), {}, {}, {}, {}, {}, BackEdge{p.root, id}};
        g.root = add(stub, false);
    }

    // a barred proof or cut-free rewrite result: tree = premiss-reachable part
    static Work adopt(const CyclicProof& p) {
        Work w;
        w.g = p;
        fill_principals(w.g);
        w.frozen.assign(p.nodes.size(), 1);
        std::vector<int> stack{p.root};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            if (!w.frozen[id]) continue;
            w.frozen[id] = 0;
            for (int c : p.nodes[id].premisses) stack.push_back(c);
        }
        for (int id = 0; id < static_cast<int>(p.nodes.size()); ++id) {
            const auto& nd = p.nodes[id];
            for (const auto& l : labels(nd.sequent)) w.used.insert(l);
            if (!w.frozen[id] && nd.backedge && !w.frozen[nd.backedge->target])
                throw CutError("back-edge into the unfolded region");
        }
        return w;
    }

    int add(ProofNode n, bool fz) {
        g.nodes.push_back(std::move(n));
        frozen.push_back(fz ? 1 : 0);
        return static_cast<int>(g.nodes.size()) - 1;
    }
    ProofNode& at(int id) { return g.nodes.at(id); }
    const Sequent& seq(int id) const { return g.nodes.at(id).sequent; }
    bool stub(int id) const { return !frozen[id] && g.nodes[id].backedge.has_value(); }

    Label fresh() {
        Label l;
        do l = "u" + std::to_string(counter++);
        while (used.count(l));
        used.insert(l);
        return l;
    }

    std::vector<int> tree_nodes() const {
        std::vector<int> out, stack{g.root};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            out.push_back(id);
            const auto& pr = g.nodes[id].premisses;
            for (auto it = pr.rbegin(); it != pr.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    std::vector<int> stubs() const {
        std::vector<int> out;
        for (int id : tree_nodes())
            if (stub(id)) out.push_back(id);
        return out;
    }

    // Replace a stub by one step of its target, with stubs above.
    void unfold_stub(int id) {
        ProofNode leaf = g.nodes[id];
        int t = leaf.backedge->target;
        Renaming s = must_complete(g.nodes[t].sequent, leaf.sequent, leaf.backedge->renaming);
        for (int guard = 0; g.nodes[t].backedge; ++guard) {
            if (guard > 1000) throw CutError("back-edge chain without a step");
            const ProofNode& tn = g.nodes[t];
            Renaming s2 = must_complete(g.nodes[tn.backedge->target].sequent, tn.sequent, tn.backedge->renaming);
            Renaming comp;
            for (const auto& [u, v] : s2) comp[u] = s.count(v) ? s.at(v) : v;
            s = comp;
            t = tn.backedge->target;
        }
        const ProofNode T = g.nodes[t];
        if (!T.rule) throw CutError("open leaf in the frozen graph");
        Renaming rho = s;
        for (int c : T.premisses)
            for (const auto& u : labels(g.nodes[c].sequent))
                if (!rho.count(u)) rho[u] = fresh();
        Sequent img = rename(T.sequent, s);
        RelCtx extra;
        for (const auto& a : leaf.sequent.rel)
            if (!img.rel.count(a)) extra.insert(a);
        ProofNode nn = T;
        nn.sequent = {leaf.sequent.rel, img.lhs, img.rhs};
        nn.premisses.clear();
        nn.backedge.reset();
        if (T.fresh) nn.fresh = rho.at(*T.fresh);
        if (T.cut_formula) nn.cut_formula = rename(*T.cut_formula, rho);
        for (int c : T.premisses) {
            const ProofNode& cn = g.nodes[c];
            Sequent cs = rename(cn.sequent, rho);
            cs.rel.insert(extra.begin(), extra.end());
            Renaming r;
            for (const auto& u : labels(cn.sequent)) r[u] = rho.at(u);
            ProofNode st{cs, {}, {}, {}, {}, {}, BackEdge{c, r}};
            nn.premisses.push_back(add(st, false));
        }
        g.nodes[id] = nn;
    }

    int copy_tree(int id) {
        ProofNode n = g.nodes[id];
        for (int& c : n.premisses) c = copy_tree(c);
        return add(n, false);
    }

    void add_rel(int id, const RelCtx& atoms) {
        if (atoms.empty()) return;
        ProofNode& n = g.nodes[id];
        n.sequent.rel.insert(atoms.begin(), atoms.end());
        std::vector<int> pr = n.premisses;
        for (int c : pr) add_rel(c, atoms);
    }

    // Premiss `c` of a rebuilt node: tree nodes move, frozen ones are shared
    // through a fresh back-edge leaf.
    int share(int c, bool parent_frozen) {
        if (!frozen[c] && !parent_frozen) return c;
        Renaming id;
        for (const auto& l : labels(g.nodes[c].sequent)) id[l] = l;
        ProofNode st{g.nodes[c].sequent, {}, {}, {}, {}, {}, BackEdge{c, id}};
        return add(st, parent_frozen);
    }

    // From a proof of S to one of S with formulas s of the left side replaced
    // by M[s] (a sub-disjunction). Adds no new labels.
    std::map<std::pair<int, Repl>, int> memo;

    static Side_ replace(const Side_& side, const Repl& M) {
        Side_ out;
        for (const auto& f : side) {
            auto it = M.find(f);
            out.push_back(it == M.end() ? f : it->second);
        }
        return out;
    }

    // Weakening/contraction chain from a proof of `have` down to `want`.
    int adjust(int m, const Sequent& want, bool fz) {
        Sequent cur = seq(m);
        std::map<DisjFormula, int> hc, wc;
        for (const auto& f : cur.lhs) ++hc[f];
        for (const auto& f : want.lhs) ++wc[f];
        int out = m;
        for (const auto& [f, k] : hc) {
            int w = wc.count(f) ? wc[f] : 0;
            if (w == 0) throw CutError("inversion lost a formula");
            for (int i = w; i < k; ++i) {
                Sequent c = cur;
                remove_one(c.lhs, f);
                out = add(node(c, Rule::cL, {out}, {{Side::L, index_of(c.lhs, f)}}), fz);
                cur = c;
            }
        }
        for (const auto& [f, k] : wc) {
            int h = hc.count(f) ? hc[f] : 0;
            for (int i = h; i < k; ++i) {
                Sequent c = cur;
                c.lhs.push_back(f);
                out = add(node(c, Rule::wL, {out}, {{Side::L, static_cast<int>(c.lhs.size()) - 1}}), fz);
                cur = c;
            }
        }
        if (cur.rel != want.rel || !multiset_equal(cur.rhs, want.rhs)) throw CutError("inversion changed the sequent");
        return out;
    }

    // as_target: the result is used as a back-edge target, not as a premiss
    int invert(int id, const Repl& M0, bool as_target = false) {
        Repl M;
        const Sequent s0 = seq(id);
        for (const auto& [k, v] : M0)
            if (contains(s0.lhs, k)) M[k] = v;
        bool fz = frozen[id];
        if (M.empty()) return as_target ? id : share(id, fz);
        auto key = std::make_pair(id, M);
        if (auto it = memo.find(key); it != memo.end())
            return as_target ? it->second : share(it->second, true);
        const ProofNode n = g.nodes[id];
        Sequent s2 = n.sequent;
        s2.lhs = replace(s2.lhs, M);
        int nid = add(ProofNode{s2, {}, {}, {}, {}, {}, {}}, fz);
        if (fz) memo[key] = nid;
        if (n.backedge) {
            int t = n.backedge->target;
            if (!frozen[t]) throw CutError("back-edge into the unfolded region");
            Renaming sigma = must_complete(seq(t), n.sequent, n.backedge->renaming);
            Renaming inv;
            for (const auto& [u, v] : sigma) inv[v] = u;
            Repl Mt;
            for (const auto& [k, v] : M) Mt[rename(k, inv)] = rename(v, inv);
            int it = invert(t, Mt, true);
            g.nodes[nid] = ProofNode{s2, {}, {}, {}, {}, {}, BackEdge{it, sigma}};
            return nid;
        }
        ProofNode out = n;
        out.sequent = s2;
        out.premisses.clear();
        const DisjFormula* pf = nullptr;
        if (!n.principal.empty() && n.principal[0].side == Side::L)
            pf = &n.sequent.lhs.at(n.principal[0].index);
        if (n.rule == Rule::dis_orL && pf && M.count(*pf)) {
            const DisjFormula chi = M.at(*pf);
            std::vector<Repl> parts;
            std::vector<bool> none;
            for (int c : n.premisses) {
                // the part this premiss adds, as check_step reads it
                Side_ rest = n.sequent.lhs, nw = seq(c).lhs;
                remove_one(rest, *pf);
                for (const auto& f : rest) remove_one(nw, f);
                if (nw.size() != 1 || !sub_disj(nw[0], *pf)) {
                    nw.clear();
                    for (const auto& f : seq(c).lhs)
                        if (!contains(n.sequent.lhs, f) && !contains(nw, f)) nw.push_back(f);
                }
                Repl Mi = M;
                bool empty = true;
                if (!nw.empty()) {
                    std::vector<LabelledFormula> ci;
                    for (const auto& d : chi.ds)
                        if (has_disjunct(nw[0], d)) ci.push_back(d);
                    empty = ci.empty();
                    if (!empty && DisjFormula(ci) != nw[0]) Mi[nw[0]] = DisjFormula(ci);
                }
                parts.push_back(Mi);
                none.push_back(empty);
            }
            if (none[0] || none[1]) {
                // chi lies inside one branch; that branch alone proves s2
                int k = none[0] ? 1 : 0;
                int a = adjust(invert(n.premisses[k], parts[k]), s2, fz);
                if (!fz) return a;
                g.nodes[nid] = ProofNode{s2, {}, {}, {}, {}, {}, BackEdge{a, identity_on(s2)}};
                return nid;
            }
            for (int k = 0; k < 2; ++k) out.premisses.push_back(invert(n.premisses[k], parts[k]));
            g.nodes[nid] = out;
            return nid;
        }
        for (std::size_t i = 0; i < n.premisses.size(); ++i) {
            Repl Mi = M;
            if (n.rule == Rule::cut && i == 1 && n.cut_formula) Mi.erase(*n.cut_formula);
            out.premisses.push_back(invert(n.premisses[i], Mi));
        }
        g.nodes[nid] = out;
        return nid;
    }

    static Renaming identity_on(const Sequent& s) {
        Renaming r;
        for (const auto& l : labels(s)) r[l] = l;
        return r;
    }

    // One rewrite at a tree cut node.
    void reduce(int cut) {
        ProofNode cn = g.nodes[cut];
        if (cn.rule != Rule::cut || !cn.cut_formula) throw CutError("not a cut");
        if (frozen[cut]) throw CutError("cut is not in the unfolded region");
        const DisjFormula phi = *cn.cut_formula;
        int L = cn.premisses[0], Q = cn.premisses[1];
        if (stub(L)) unfold_stub(L);
        const ProofNode ln = g.nodes[L];
        const Sequent C = cn.sequent;
        if (!ln.rule) throw CutError("open left premiss");
        switch (*ln.rule) {
            case Rule::dis_orR: {
                int P = ln.premisses.at(0);
                const DisjFormula chi = seq(P).rhs.at(0);
                if (chi != phi) {
                    if (!sub_disj(chi, phi)) throw CutError("dis_orR premiss is not a sub-disjunction");
                    Q = invert(Q, {{phi, chi}});
                }
                g.nodes[cut] = node(C, Rule::cut, {P, Q}, {}, {}, chi);
                return;
            }
            case Rule::botL:
                g.nodes[cut] = node(C, Rule::botL);
                return;
            case Rule::th: {
                int P = ln.premisses.at(0);
                RelCtx diff;
                for (const auto& a : ln.sequent.rel)
                    if (!seq(P).rel.count(a)) diff.insert(a);
                add_rel(P, diff);
                g.nodes[cut] = node(C, Rule::cut, {P, Q}, {}, {}, phi);
                return;
            }
            case Rule::wL:
            case Rule::cL:
                g.nodes[cut] = node(C, Rule::cut, {ln.premisses.at(0), Q}, {}, {}, phi);
                return;
            case Rule::cut: {
                int P1 = ln.premisses.at(0), Q1 = ln.premisses.at(1);
                int N = add(node(cut_conclusion(seq(Q1), seq(Q), phi), Rule::cut, {Q1, Q}, {}, {}, phi), false);
                g.nodes[cut] = node(C, Rule::cut, {P1, N}, {}, {}, ln.cut_formula);
                return;
            }
            case Rule::andL:
            case Rule::orL:
            case Rule::boxL:
            case Rule::diaL:
            case Rule::tr:
            case Rule::impL:
            case Rule::macro_impL:
            case Rule::dis_orL: {
                if (ln.fresh && labels(C).count(*ln.fresh)) throw CutError("fresh label clash");
                ProofNode nn = ln;
                nn.sequent = C;
                nn.premisses.clear();
                for (auto& pos : nn.principal) {
                    const auto& from = pos.side == Side::L ? ln.sequent.lhs : ln.sequent.rhs;
                    const auto& to = pos.side == Side::L ? C.lhs : C.rhs;
                    pos.index = index_of(to, from.at(pos.index));
                    if (pos.index < 0) throw CutError("principal formula lost in the cut conclusion");
                }
                bool usedQ = false;
                for (int P : ln.premisses) {
                    if (!contains(seq(P).rhs, phi)) {
                        nn.premisses.push_back(P);
                        continue;
                    }
                    int Qi = usedQ ? copy_tree(Q) : Q;
                    usedQ = true;
                    RelCtx diff;
                    for (const auto& a : seq(P).rel)
                        if (!C.rel.count(a)) diff.insert(a);
                    add_rel(Qi, diff);
                    nn.premisses.push_back(
                        add(node(cut_conclusion(seq(P), seq(Qi), phi), Rule::cut, {P, Qi}, {}, {}, phi), false));
                }
                g.nodes[cut] = nn;
                return;
            }
            default:
                throw CutError("no reduction for a cut over " + rule_name(*ln.rule));
        }
    }

    // Reachable part, renumbered; returns old id -> new id (-1 if dropped).
    std::vector<int> gc() {
        int n = static_cast<int>(g.nodes.size());
        std::vector<int> nid(n, -1), order;
        std::deque<int> q{g.root};
        nid[g.root] = 0;
        order.push_back(g.root);
        while (!q.empty()) {
            int id = q.front();
            q.pop_front();
            std::vector<int> next = g.nodes[id].premisses;
            if (g.nodes[id].backedge) next.push_back(g.nodes[id].backedge->target);
            for (int c : next)
                if (nid[c] < 0) {
                    nid[c] = static_cast<int>(order.size());
                    order.push_back(c);
                    q.push_back(c);
                }
        }
        CyclicProof out;
        out.system = g.system;
        out.root = 0;
        std::vector<char> fz;
        for (int id : order) {
            ProofNode nd = g.nodes[id];
            for (int& c : nd.premisses) c = nid[c];
            if (nd.backedge) nd.backedge->target = nid[nd.backedge->target];
            out.nodes.push_back(std::move(nd));
            fz.push_back(frozen[id]);
        }
        g = std::move(out);
        frozen = std::move(fz);
        memo.clear();
        return nid;
    }

    // Frozen nodes that reach a cut of degree >= d.
    std::vector<char> reaches_cut(int d) const {
        int n = static_cast<int>(g.nodes.size());
        std::vector<std::vector<int>> rev(n);
        std::vector<char> mark(n, 0);
        std::deque<int> q;
        for (int id = 0; id < n; ++id) {
            const auto& nd = g.nodes[id];
            for (int c : nd.premisses) rev[c].push_back(id);
            if (nd.backedge) rev[nd.backedge->target].push_back(id);
            if (nd.rule == Rule::cut && nd.cut_formula && static_cast<int>(nd.cut_formula->degree()) >= d) {
                mark[id] = 1;
                q.push_back(id);
            }
        }
        while (!q.empty()) {
            int id = q.front();
            q.pop_front();
            for (int p : rev[id])
                if (!mark[p]) {
                    mark[p] = 1;
                    q.push_back(p);
                }
        }
        return mark;
    }
};

bool is_dcut(const ProofNode& n, int d) {
    return n.rule == Rule::cut && n.cut_formula && static_cast<int>(n.cut_formula->degree()) >= d;
}

struct Pusher {
    Work& w;
    int d;
    std::set<int> stuck;
    std::size_t steps = 0;
    std::string violation;

    // Bar: stubs and stuck cuts, by relational context.
    std::vector<RelCtx> bar_rels() const {
        std::vector<RelCtx> out;
        for (int id : bar()) out.push_back(w.seq(id).rel);
        return out;
    }

    std::vector<int> bar() const {
        std::vector<int> out, stack{w.g.root};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            if (w.stub(id) || stuck.count(id)) {
                out.push_back(id);
                continue;
            }
            const auto& pr = w.g.nodes[id].premisses;
            for (auto it = pr.rbegin(); it != pr.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    // Topmost d-cut beneath the bar, leftmost first; -1 when none.
    int topmost() const {
        int found = -1;
        std::function<bool(int)> go = [&](int id) -> bool {
            if (found >= 0) return true;
            if (w.stub(id) || stuck.count(id)) return false;
            const ProofNode& n = w.g.nodes[id];
            bool above = false;
            for (int c : n.premisses) above = go(c) || above;
            if (found >= 0) return true;
            if (is_dcut(n, d)) {
                if (!above) found = id;
                return true;
            }
            return above;
        };
        go(w.g.root);
        return found;
    }

    bool run(std::size_t max_steps, bool check) {
        while (true) {
            int c = topmost();
            if (c < 0) return true;
            if (w.stub(w.g.nodes[c].premisses[0])) {
                stuck.insert(c);
                continue;
            }
            if (steps >= max_steps) return false;
            std::vector<RelCtx> before;
            if (check) before = bar_rels();
            Sequent concl = w.seq(w.g.root);
            w.reduce(c);
            ++steps;
            if (check && violation.empty()) {
                if (!same_sequent(concl, w.seq(w.g.root))) violation = "conclusion changed";
                for (int b : bar()) {
                    const RelCtx& r = w.seq(b).rel;
                    bool ok = std::any_of(before.begin(), before.end(), [&](const RelCtx& o) {
                        return std::includes(r.begin(), r.end(), o.begin(), o.end());
                    });
                    if (!ok && stuck.count(b) == 0) {
                        violation = "bar context shrank at node " + std::to_string(b);
                        break;
                    }
                }
            }
        }
    }
};

TraceRelation identity_relation(const Sequent& s, int id) {
    TraceRelation r{id, id, {}};
    for (const auto& l : labels(s)) r.edges.push_back({l, l, false});
    return r;
}

// Close each leaf in `leaves` by a back-edge to an ancestor (tree edges given
// by `parent`) that embeds into it, through weakenings when the leaf has more
// formulas. The cycle through the new back-edge must progress.
bool fold_leaves(CyclicProof& g, const std::vector<int>& leaves, const std::vector<int>& parent,
                 std::vector<char>* fz) {
    for (int b : leaves) {
        std::vector<int> path;
        for (int a = parent[b]; a >= 0; a = parent[a]) path.push_back(a);
        std::reverse(path.begin(), path.end());
        const Sequent bs = g.nodes[b].sequent;
        bool done = false;
        for (std::size_t k = 0; k < path.size() && !done; ++k) {
            int A = path[k];
            const Sequent as = g.nodes[A].sequent;
            if (as.rhs.size() != bs.rhs.size()) continue;
            // trace relation from A up to b
            TraceRelation rel = identity_relation(as, A);
            for (std::size_t j = k; j < path.size(); ++j) {
                int from = path[j], to = j + 1 < path.size() ? path[j + 1] : b;
                rel = compose(rel, edge_trace_relation(g, from, to));
            }
            for_each_embedding(as, bs, [&](const Renaming& sigma) {
                Sequent img = rename(as, sigma);
                if (!multiset_equal(img.rhs, bs.rhs)) return false;
                TraceRelation back{b, A, {}};
                std::map<std::pair<Label, Label>, bool> m;
                for (const auto& [u, su] : sigma) {
                    m[{su, u}] = m[{su, u}] || false;
                    for (const auto& [x, y] : bs.rel)
                        if (y == su) m[{x, u}] = true;
                }
                for (const auto& [k2, v] : m) back.edges.push_back({k2.first, k2.second, v});
                if (!cycle_progresses(compose(rel, back))) return false;
                // weaken down from the renamed companion to b
                Sequent cs{bs.rel, img.lhs, img.rhs};
                Side_ extra = bs.lhs;
                for (const auto& f : img.lhs) remove_one(extra, f);
                ProofNode be{cs, {}, {}, {}, {}, {}, BackEdge{A, sigma}};
                if (extra.empty()) {
                    g.nodes[b] = be;
                } else {
                    g.nodes.push_back(be);
                    if (fz) fz->push_back(0);
                    int cur = static_cast<int>(g.nodes.size()) - 1;
                    for (std::size_t i = 0; i + 1 < extra.size(); ++i) {
                        cs.lhs.push_back(extra[i]);
                        g.nodes.push_back(node(cs, Rule::wL, {cur}, {{Side::L, static_cast<int>(cs.lhs.size()) - 1}}));
                        if (fz) fz->push_back(0);
                        cur = static_cast<int>(g.nodes.size()) - 1;
                    }
                    g.nodes[b] = node(bs, Rule::wL, {cur}, {{Side::L, index_of(bs.lhs, extra.back())}});
                }
                done = true;
                return true;
            });
        }
        if (!done) return false;
    }
    return true;
}

std::vector<int> tree_parent_map(const CyclicProof& g) {
    std::vector<int> parent(g.nodes.size(), -1);
    std::vector<int> stack{g.root};
    std::vector<char> seen(g.nodes.size(), 0);
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = 1;
        for (int c : g.nodes[id].premisses) {
            parent[c] = id;
            stack.push_back(c);
        }
    }
    return parent;
}

std::optional<std::string> verify(const CyclicProof& p, int d) {
    LocalReport lr = check_local(p);
    if (!lr.ok)
        return "node " + std::to_string(lr.violations.front().node) + ": " + lr.violations.front().message;
    ProgressReport pr = check_progress(p);
    if (!pr.progressing) return std::string("a cycle without progress");
    if (degree_of(p) >= d) return std::string("degree did not drop");
    return std::nullopt;
}

// Try to turn the work graph into a cyclic proof without d-cuts.
std::optional<CyclicProof> try_fold(const Work& w0, int d, const std::set<int>& stuck) {
    Work w = w0;
    std::vector<char> reach = w.reaches_cut(d);
    Pusher view{w, d, stuck, 0, {}};
    std::vector<int> leaves;
    for (int b : view.bar()) {
        if (w.stub(b) && !reach[w.g.nodes[b].backedge->target]) continue;
        leaves.push_back(b);
    }
    std::vector<int> parent = tree_parent_map(w.g);
    for (int b : leaves) {
        ProofNode& n = w.g.nodes[b];
        n.premisses.clear();
    }
    if (!fold_leaves(w.g, leaves, parent, &w.frozen)) return std::nullopt;
    w.gc();
    if (verify(w.g, d)) return std::nullopt;
    return w.g;
}

// Frozen nodes lying on a cycle of the frozen graph. Stubs into the other
// frozen nodes can be unfolded completely.
std::vector<char> frozen_on_cycle(const Work& w) {
    int n = static_cast<int>(w.g.nodes.size());
    std::vector<std::vector<int>> succ(n);
    for (int v = 0; v < n; ++v) {
        if (!w.frozen[v]) continue;
        const ProofNode& nd = w.g.nodes[v];
        succ[v] = nd.premisses;
        if (nd.backedge) succ[v].push_back(nd.backedge->target);
    }
    // Tarjan, iteratively
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on(n, 0), cyc(n, 0);
    int counter = 0;
    for (int r = 0; r < n; ++r) {
        if (!w.frozen[r] || index[r] >= 0) continue;
        std::vector<std::pair<int, std::size_t>> call{{r, 0}};
        index[r] = low[r] = counter++;
        stack.push_back(r);
        on[r] = 1;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < succ[v].size()) {
                int u = succ[v][i++];
                if (index[u] < 0) {
                    index[u] = low[u] = counter++;
                    stack.push_back(u);
                    on[u] = 1;
                    call.push_back({u, 0});
                } else if (on[u]) {
                    low[v] = std::min(low[v], index[u]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int u;
                do {
                    u = stack.back();
                    stack.pop_back();
                    on[u] = 0;
                    comp.push_back(u);
                } while (u != v);
                bool self = std::count(succ[v].begin(), succ[v].end(), v) > 0;
                if (comp.size() > 1 || self)
                    for (int c : comp) cyc[c] = 1;
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return cyc;
}

}  // namespace

std::vector<CutInfo> cuts_of(const CyclicProof& p) {
    std::vector<CutInfo> out;
    for (int id = 0; id < static_cast<int>(p.nodes.size()); ++id) {
        const auto& nd = p.nodes[id];
        if (nd.rule == Rule::cut && nd.cut_formula)
            out.push_back({id, *nd.cut_formula, static_cast<int>(nd.cut_formula->degree())});
    }
    return out;
}

int degree_of(const CyclicProof& p) {
    int d = 0;
    for (const auto& c : cuts_of(p)) d = std::max(d, c.degree);
    return d;
}

CyclicProof embed_multisuccedent(const CyclicProof& p) { return Embedder(p).run(); }

CyclicProof invert_or_left(const CyclicProof& p, int index, int i) {
    const Sequent& s = p.conclusion();
    if (index < 0 || index >= static_cast<int>(s.lhs.size()) || s.lhs[index].degree() < 2)
        throw CutError("no disjunction at that position");
    const DisjFormula& phi = s.lhs[index];
    DisjFormula chi = i == 0 ? DisjFormula(std::vector<LabelledFormula>{phi.ds.front()})
                             : DisjFormula(std::vector<LabelledFormula>(phi.ds.begin() + 1, phi.ds.end()));
    Work w(p);
    w.g.root = w.invert(w.g.root, {{phi, chi}});
    w.gc();
    return w.g;
}

CyclicProof reduce_cut_step(const CyclicProof& p, int cut) {
    if (cut < 0 || cut >= static_cast<int>(p.nodes.size()) || p.nodes[cut].rule != Rule::cut)
        throw CutError("not a cut node");
    std::vector<int> parent = tree_parents(p);
    std::vector<int> path{cut};
    while (path.back() != p.root) {
        int a = parent[path.back()];
        if (a < 0) throw CutError("cut is not reachable through premisses");
        path.push_back(a);
    }
    std::reverse(path.begin(), path.end());
    Work w(p);
    int cur = w.g.root;
    for (std::size_t k = 0; k < path.size(); ++k) {
        w.unfold_stub(cur);
        if (k + 1 == path.size()) break;
        int next = -1;
        for (int c : w.g.nodes[cur].premisses)
            if (w.g.nodes[c].backedge->target == path[k + 1]) next = c;
        cur = next;
    }
    w.reduce(cur);
    w.gc();
    return w.g;
}

BarredProof compute_bar(const CyclicProof& p, int height) {
    Work w(p);
    for (int h = 0; h < height; ++h)
        for (int s : w.stubs()) w.unfold_stub(s);
    w.gc();
    BarredProof out;
    for (int id : w.tree_nodes()) {
        const auto& nd = w.g.nodes[id];
        if (w.stub(id) || (nd.premisses.empty() && nd.rule)) out.bar.push_back(id);
    }
    out.tree = std::move(w.g);
    return out;
}

PushResult push_cuts_above_bar(const BarredProof& b, int d, std::size_t max_steps) {
    Work w = Work::adopt(b.tree);
    Pusher pu{w, d, {}, 0, {}};
    PushResult res;
    res.finished = pu.run(max_steps, true);
    res.steps = pu.steps;
    res.violation = pu.violation;
    Bar bar = pu.bar();
    std::vector<int> nid = w.gc();
    for (int id : bar) res.bar.push_back(nid[id]);
    res.proof = std::move(w.g);
    return res;
}

DegreeReduction degree_reduce_bounded(const CyclicProof& p, int max_height) {
    DegreeReduction res;
    int d = degree_of(p);
    res.degree = d;
    if (d <= 1) {
        res.proof = p;
        res.note = "degree is already at most 1";
        return res;
    }
    ThinningResult th = eliminate_thinning(p);
    Work w(th.ok ? th.proof : p);
    for (int h = 1; h <= max_height; ++h) {
        std::vector<char> reach = w.reaches_cut(d);
        std::set<int> blocking;
        for (int id : w.tree_nodes())
            if (is_dcut(w.g.nodes[id], d)) blocking.insert(w.g.nodes[id].premisses[0]);
        for (int s : w.stubs())
            if (reach[w.g.nodes[s].backedge->target] || blocking.count(s)) w.unfold_stub(s);
        // acyclic parts cost no height
        for (bool again = true; again;) {
            again = false;
            std::vector<char> cyc = frozen_on_cycle(w);
            reach = w.reaches_cut(d);
            blocking.clear();
            for (int id : w.tree_nodes())
                if (is_dcut(w.g.nodes[id], d)) blocking.insert(w.g.nodes[id].premisses[0]);
            for (int s : w.stubs()) {
                int t = w.g.nodes[s].backedge->target;
                if (!cyc[t] && (reach[t] || blocking.count(s))) {
                    w.unfold_stub(s);
                    again = true;
                }
            }
        }
        Pusher pu{w, d, {}, 0, {}};
        bool fin = pu.run(200000, true);
        res.steps += pu.steps;
        if (res.violation.empty()) res.violation = pu.violation;
        if (!fin) {
            res.note = "step cap reached at height " + std::to_string(h);
            break;
        }
        if (auto f = try_fold(w, d, pu.stuck)) {
            res.proof = std::move(*f);
            res.degree = degree_of(res.proof);
            res.height = h;
            return res;
        }
        w.gc();
    }
    res.unfinished = true;
    res.height = max_height;
    if (res.note.empty()) res.note = "no fold up to height " + std::to_string(max_height);
    w.gc();
    res.proof = w.g;
    return res;
}

std::optional<CyclicProof> ik4_from_mik4(const CyclicProof& p, int max_height, std::string* why) {
    auto fail = [&](std::string m) -> std::optional<CyclicProof> {
        if (why) *why = std::move(m);
        return std::nullopt;
    };
    CyclicProof e;
    try {
        e = embed_multisuccedent(p);
        for (int round = 0; degree_of(e) > 1; ++round) {
            if (round > 64) return fail("degree reduction does not converge");
            DegreeReduction r = degree_reduce_bounded(e, max_height);
            if (r.unfinished) return fail("degree " + std::to_string(r.degree) + ": " + r.note);
            e = std::move(r.proof);
        }
    } catch (const CutError& ex) {
        return fail(ex.what());
    }
    for (const auto& nd : e.nodes)
        for (const auto* side : {&nd.sequent.lhs, &nd.sequent.rhs})
            for (const auto& f : *side)
                if (!f.labelled()) return fail("a disjunction survives in the reduct");
    e.system = SystemId::IK4;
    LocalReport lr = check_local(e);
    if (!lr.ok) return fail("IK4 check: " + lr.violations.front().message);
    if (!check_progress(e).progressing) return fail("IK4 check: a cycle without progress");
    return e;
}

std::optional<CyclicProof> refold(const CyclicProof& tree) {
    CyclicProof g = tree;
    std::vector<int> leaves;
    for (int id = 0; id < static_cast<int>(g.nodes.size()); ++id)
        if (!g.nodes[id].rule && !g.nodes[id].backedge) leaves.push_back(id);
    std::vector<int> parent = tree_parent_map(g);
    if (!fold_leaves(g, leaves, parent, nullptr)) return std::nullopt;
    // drop what the folds left unreachable
    Work w;
    w.g = std::move(g);
    w.frozen.assign(w.g.nodes.size(), 0);
    w.gc();
    g = std::move(w.g);
    if (!check_local(g).ok || !check_progress(g).progressing) return std::nullopt;
    return g;
}

}  // namespace igl
