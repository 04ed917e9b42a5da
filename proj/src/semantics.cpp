#include "igl/semantics.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace igl {

BirelModel BirelModel::empty(int n) {
    BirelModel m;
    for (int i = 0; i < n; ++i) m.names.push_back("w" + std::to_string(i));
    m.leq.assign(n, std::vector<char>(n, 0));
    m.acc.assign(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) m.leq[i][i] = 1;
    m.val.assign(n, {});
    return m;
}

int BirelModel::world(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names[i] == name) return i;
    throw std::invalid_argument("unknown world " + name);
}

int KripkeStructure::world(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names[i] == name) return i;
    throw std::invalid_argument("unknown world " + name);
}

bool KripkeStructure::in_domain(int w, const Element& d) const {
    return std::find(domain[w].begin(), domain[w].end(), d) != domain[w].end();
}

namespace {

using Matrix = std::vector<std::vector<char>>;

std::optional<std::string> partial_order_violation(const Matrix& leq, const std::vector<std::string>& nm) {
    int n = static_cast<int>(leq.size());
    for (int a = 0; a < n; ++a) {
        if (!leq[a][a]) return "leq not reflexive at " + nm[a];
        for (int b = 0; b < n; ++b) {
            if (a != b && leq[a][b] && leq[b][a])
                return "leq not antisymmetric: " + nm[a] + ", " + nm[b];
            for (int c = 0; c < n; ++c)
                if (leq[a][b] && leq[b][c] && !leq[a][c])
                    return "leq not transitive: " + nm[a] + " <= " + nm[b] + " <= " + nm[c];
        }
    }
    return std::nullopt;
}

void closure(Matrix& r, bool reflexive) {
    int n = static_cast<int>(r.size());
    if (reflexive)
        for (int i = 0; i < n; ++i) r[i][i] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (r[i][k])
                for (int j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = 1;
}

// Finds a cycle in a directed graph given by successor lists.
std::optional<std::vector<int>> find_cycle(const std::vector<std::vector<int>>& succ) {
    int n = static_cast<int>(succ.size());
    std::vector<int> colour(n, 0), parent(n, -1);
    for (int s = 0; s < n; ++s) {
        if (colour[s]) continue;
        std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
        colour[s] = 1;
        while (!stack.empty()) {
            auto& [v, k] = stack.back();
            if (k == succ[v].size()) {
                colour[v] = 2;
                stack.pop_back();
                continue;
            }
            int u = succ[v][k++];
            if (colour[u] == 1) {
                std::vector<int> cyc{u};
                for (int t = v; t != u; t = parent[t]) cyc.push_back(t);
                cyc.push_back(u);
                std::reverse(cyc.begin(), cyc.end());
                return cyc;
            }
            if (colour[u] == 0) {
                colour[u] = 1;
                parent[u] = v;
                stack.push_back({u, 0});
            }
        }
    }
    return std::nullopt;
}

}  // namespace

void close_leq(BirelModel& m) { closure(m.leq, true); }
void close_acc(BirelModel& m) { closure(m.acc, false); }

std::optional<std::string> check_birel_model(const BirelModel& m) {
    int n = m.size();
    if (n == 0) return "no worlds";
    if (auto v = partial_order_violation(m.leq, m.names)) return v;
    for (int w = 0; w < n; ++w)
        for (int w2 = 0; w2 < n; ++w2) {
            if (!m.leq[w][w2]) continue;
            for (const auto& p : m.val[w])
                if (!m.val[w2].count(p)) return "valuation not monotone: " + p + " at " + m.names[w];
            for (int v = 0; v < n; ++v) {
                if (!m.acc[w][v]) continue;
                bool ok = false;
                for (int v2 = 0; v2 < n && !ok; ++v2) ok = m.leq[v][v2] && m.acc[w2][v2];
                if (!ok) return "F1 fails for " + m.names[w] + " <= " + m.names[w2] + ", " + m.names[w] + " R " + m.names[v];
            }
        }
    for (int w = 0; w < n; ++w)
        for (int v = 0; v < n; ++v) {
            if (!m.acc[w][v]) continue;
            for (int v2 = 0; v2 < n; ++v2) {
                if (!m.leq[v][v2]) continue;
                bool ok = false;
                for (int w2 = 0; w2 < n && !ok; ++w2) ok = m.leq[w][w2] && m.acc[w2][v2];
                if (!ok) return "F2 fails for " + m.names[w] + " R " + m.names[v] + " <= " + m.names[v2];
            }
        }
    return std::nullopt;
}

ClassReport check_igl_birel_class(const BirelModel& m) {
    int n = m.size();
    ClassReport r;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (m.acc[a][b] && m.acc[b][c] && !m.acc[a][c]) {
                    r.ok = false;
                    r.message = "R not transitive: " + m.names[a] + " R " + m.names[b] + " R " + m.names[c];
                    return r;
                }
    // composite (leq;acc), remembering one middle world per edge
    std::vector<std::vector<int>> succ(n);
    std::map<std::pair<int, int>, int> mid;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int u = 0; u < n; ++u)
                if (m.leq[a][u] && m.acc[u][b]) {
                    succ[a].push_back(b);
                    mid[{a, b}] = u;
                    break;
                }
    if (auto cyc = find_cycle(succ)) {
        r.ok = false;
        std::string msg = "(<=;R) has a cycle:";
        for (std::size_t k = 0; k + 1 < cyc->size(); ++k) {
            int a = (*cyc)[k], b = (*cyc)[k + 1], u = mid[{a, b}];
            r.cycle.push_back(a);
            r.cycle.push_back(u);
            msg += " " + m.names[a] + " <= " + m.names[u] + " R";
        }
        r.cycle.push_back(cyc->front());
        msg += " " + m.names[cyc->front()];
        r.message = msg;
    }
    return r;
}

std::vector<char> birel_truth(const BirelModel& m, Formula f, bool classical) {
    std::unordered_map<Formula, std::vector<char>> memo;
    int n = m.size();
    std::function<const std::vector<char>&(Formula)> ev = [&](Formula g) -> const std::vector<char>& {
        if (auto it = memo.find(g); it != memo.end()) return it->second;
        std::vector<char> t(n, 0);
        switch (g->op) {
            case Op::Atom:
                for (int w = 0; w < n; ++w) t[w] = m.val[w].count(g->name) > 0;
                break;
            case Op::Bot:
                break;
            case Op::And: {
                auto a = ev(g->a);
                const auto& b = ev(g->b);
                for (int w = 0; w < n; ++w) t[w] = a[w] && b[w];
                break;
            }
            case Op::Or: {
                auto a = ev(g->a);
                const auto& b = ev(g->b);
                for (int w = 0; w < n; ++w) t[w] = a[w] || b[w];
                break;
            }
            case Op::Imp: {
                auto a = ev(g->a);
                const auto& b = ev(g->b);
                for (int w = 0; w < n; ++w) {
                    bool ok = true;
                    for (int v = 0; v < n && ok; ++v)
                        if ((classical ? v == w : bool(m.leq[w][v])) && a[v] && !b[v]) ok = false;
                    t[w] = ok;
                }
                break;
            }
            case Op::Box: {
                const auto& a = ev(g->a);
                for (int w = 0; w < n; ++w) {
                    bool ok = true;
                    for (int w2 = 0; w2 < n && ok; ++w2) {
                        if (!(classical ? w2 == w : bool(m.leq[w][w2]))) continue;
                        for (int v = 0; v < n && ok; ++v)
                            if (m.acc[w2][v] && !a[v]) ok = false;
                    }
                    t[w] = ok;
                }
                break;
            }
            case Op::Dia: {
                const auto& a = ev(g->a);
                for (int w = 0; w < n; ++w)
                    for (int v = 0; v < n; ++v)
                        if (m.acc[w][v] && a[v]) t[w] = 1;
                break;
            }
        }
        return memo.emplace(g, std::move(t)).first->second;
    };
    return ev(f);
}

bool birel_satisfies(const BirelModel& m, int w, Formula f, bool classical) {
    if (w < 0 || w >= m.size()) throw std::invalid_argument("unknown world");
    return birel_truth(m, f, classical)[w];
}

// ---- Kripke structures

std::optional<std::string> check_kripke_structure(const KripkeStructure& k) {
    int n = k.size();
    if (n == 0) return "no worlds";
    if (auto v = partial_order_violation(k.leq, k.names)) return v;
    for (int w = 0; w < n; ++w) {
        if (k.domain[w].empty()) return "empty domain at " + k.names[w];
        for (const auto& [p, ds] : k.pred[w])
            for (const auto& d : ds)
                if (!k.in_domain(w, d)) return "predicate " + p + " outside domain at " + k.names[w];
        for (const auto& [a, b] : k.rel[w])
            if (!k.in_domain(w, a) || !k.in_domain(w, b)) return "relation outside domain at " + k.names[w];
        for (int w2 = 0; w2 < n; ++w2) {
            if (!k.leq[w][w2]) continue;
            for (const auto& d : k.domain[w])
                if (!k.in_domain(w2, d)) return "domain not monotone at " + k.names[w];
            for (const auto& [p, ds] : k.pred[w]) {
                auto it = k.pred[w2].find(p);
                for (const auto& d : ds)
                    if (it == k.pred[w2].end() || !it->second.count(d))
                        return "predicate " + p + " not monotone at " + k.names[w];
            }
            for (const auto& e : k.rel[w])
                if (!k.rel[w2].count(e)) return "relation not monotone at " + k.names[w];
        }
    }
    return std::nullopt;
}

ClassReport check_igl_pred_class(const KripkeStructure& k) {
    ClassReport r;
    for (int w = 0; w < k.size(); ++w)
        for (const auto& [a, b] : k.rel[w])
            for (const auto& [c, d] : k.rel[w])
                if (b == c && !k.rel[w].count({a, d})) {
                    r.ok = false;
                    r.message = "R_" + k.names[w] + " not transitive at " + a + ", " + b + ", " + d;
                    return r;
                }
    PredBirel pb = pred_to_birel(k);
    ClassReport c = check_igl_birel_class(pb.model);
    if (!c.ok) {
        r.ok = false;
        r.message = c.message;
        r.cycle = c.cycle;
    }
    return r;
}

namespace {

bool ksat(const KripkeStructure& k, int w, const Element& d, Formula f) {
    switch (f->op) {
        case Op::Atom: {
            auto it = k.pred[w].find(f->name);
            return it != k.pred[w].end() && it->second.count(d);
        }
        case Op::Bot:
            return false;
        case Op::And:
            return ksat(k, w, d, f->a) && ksat(k, w, d, f->b);
        case Op::Or:
            return ksat(k, w, d, f->a) || ksat(k, w, d, f->b);
        case Op::Imp:
            for (int w2 = 0; w2 < k.size(); ++w2)
                if (k.leq[w][w2] && ksat(k, w2, d, f->a) && !ksat(k, w2, d, f->b)) return false;
            return true;
        case Op::Box:
            for (int w2 = 0; w2 < k.size(); ++w2) {
                if (!k.leq[w][w2]) continue;
                for (const auto& e : k.domain[w2])
                    if (k.rel[w2].count({d, e}) && !ksat(k, w2, e, f->a)) return false;
            }
            return true;
        case Op::Dia:
            for (const auto& e : k.domain[w])
                if (k.rel[w].count({d, e}) && ksat(k, w, e, f->a)) return true;
            return false;
    }
    return false;
}

}  // namespace

bool kripke_satisfies(const KripkeStructure& k, int w, const Environment& env, const Label& x, Formula f) {
    if (w < 0 || w >= k.size()) throw std::invalid_argument("unknown world");
    auto it = env.find(x);
    if (it == env.end()) throw std::invalid_argument("environment undefined on " + x);
    if (!k.in_domain(w, it->second)) throw std::invalid_argument("environment value outside D_w");
    return ksat(k, w, it->second, f);
}

int PredBirel::index(int w, const Element& d) const {
    for (std::size_t i = 0; i < origin.size(); ++i)
        if (origin[i].first == w && origin[i].second == d) return static_cast<int>(i);
    return -1;
}

PredBirel pred_to_birel(const KripkeStructure& k) {
    PredBirel out;
    for (int w = 0; w < k.size(); ++w)
        for (const auto& d : k.domain[w]) out.origin.push_back({w, d});
    int n = static_cast<int>(out.origin.size());
    BirelModel& m = out.model;
    m.leq.assign(n, std::vector<char>(n, 0));
    m.acc.assign(n, std::vector<char>(n, 0));
    m.val.assign(n, {});
    for (int i = 0; i < n; ++i) {
        const auto& [w, d] = out.origin[i];
        m.names.push_back(k.names[w] + ":" + d);
        for (const auto& [p, ds] : k.pred[w])
            if (ds.count(d)) m.val[i].insert(p);
        for (int j = 0; j < n; ++j) {
            const auto& [w2, d2] = out.origin[j];
            m.leq[i][j] = k.leq[w][w2] && d == d2;
            m.acc[i][j] = w == w2 && k.rel[w].count({d, d2});
        }
    }
    return out;
}

// ---- sequents

bool is_interpretation(const BirelModel& m, const Sequent& s, const Interpretation& i) {
    for (const auto& l : labels(s)) {
        auto it = i.find(l);
        if (it == i.end() || it->second < 0 || it->second >= m.size()) return false;
    }
    for (const auto& [a, b] : s.rel)
        if (!m.acc[i.at(a)][i.at(b)]) return false;
    return true;
}

namespace {

bool disj_true(const BirelModel& m, const Interpretation& i, const DisjFormula& f) {
    for (const auto& d : f.ds)
        if (birel_satisfies(m, i.at(d.label), d.formula)) return true;
    return false;
}

}  // namespace

bool seq_satisfied(const BirelModel& m, const Interpretation& i, const Sequent& s) {
    if (!is_interpretation(m, s, i)) throw std::invalid_argument("not an interpretation of the sequent");
    for (const auto& g : s.lhs)
        if (!disj_true(m, i, g)) return true;
    for (const auto& d : s.rhs)
        if (disj_true(m, i, d)) return true;
    return false;
}

std::optional<Interpretation> lift_interpretation(const BirelModel& m, const Sequent& s,
                                                  const Interpretation& i, const Label& x, int w) {
    auto parents = quasi_tree_parents(s);
    if (!parents) return std::nullopt;
    auto ix = i.find(x);
    if (ix == i.end() || !m.leq[ix->second][w]) return std::nullopt;
    std::map<Label, std::vector<Label>> adj;
    for (const auto& [c, p] : *parents) {
        adj[c].push_back(p);
        adj[p].push_back(c);
    }
    Interpretation j = i;
    j[x] = w;
    std::set<Label> done{x};
    std::deque<Label> queue{x};
    int n = m.size();
    // the <=-least candidate, ties broken by world index
    auto least = [&](const std::vector<int>& cands) -> int {
        for (int c : cands) {
            bool minimal = true;
            for (int c2 : cands)
                if (c2 != c && m.leq[c2][c]) minimal = false;
            if (minimal) return c;
        }
        return -1;
    };
    while (!queue.empty()) {
        Label u = queue.front();
        queue.pop_front();
        for (const auto& nb : adj[u]) {
            if (done.count(nb)) continue;
            if (!i.count(nb)) return std::nullopt;
            int old = i.at(nb);
            std::vector<int> cands;
            bool child = parents->count(nb) && parents->at(nb) == u;
            for (int v = 0; v < n; ++v) {
                if (!m.leq[old][v]) continue;
                if (child ? m.acc[j[u]][v] : m.acc[v][j[u]]) cands.push_back(v);
            }
            int pick = least(cands);
            if (pick < 0) return std::nullopt;
            j[nb] = pick;
            done.insert(nb);
            queue.push_back(nb);
        }
    }
    if (!is_interpretation(m, s, j)) return std::nullopt;
    return j;
}

void for_each_interpretation(const BirelModel& m, const Sequent& s,
                             const std::function<bool(const Interpretation&)>& f) {
    std::vector<Label> ls;
    for (const auto& l : labels(s)) ls.push_back(l);
    Interpretation cur;
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
        if (k == ls.size()) return is_interpretation(m, s, cur) ? f(cur) : true;
        for (int w = 0; w < m.size(); ++w) {
            cur[ls[k]] = w;
            bool partial_ok = true;
            for (const auto& [a, b] : s.rel)
                if (cur.count(a) && cur.count(b) && !m.acc[cur[a]][cur[b]]) partial_ok = false;
            if (partial_ok && !go(k + 1)) return false;
        }
        cur.erase(ls[k]);
        return true;
    };
    go(0);
}

namespace {

bool fails(const BirelModel& m, const Sequent& s, const Interpretation& j) {
    return is_interpretation(m, s, j) && !seq_satisfied(m, j, s);
}

const DisjFormula* principal_of(const RuleInstance& r) {
    if (r.principal.empty()) return nullptr;
    const auto& p = r.principal.front();
    const auto& side = p.side == Side::L ? r.conclusion.lhs : r.conclusion.rhs;
    if (p.index < 0 || p.index >= static_cast<int>(side.size())) return nullptr;
    return &side[p.index];
}

std::optional<SoundnessWitness> construct(const BirelModel& m, const RuleInstance& r, const Interpretation& i) {
    const DisjFormula* pf = principal_of(r);
    int n = m.size();
    auto same = [&]() -> std::optional<SoundnessWitness> {
        for (std::size_t k = 0; k < r.premisses.size(); ++k)
            if (fails(m, r.premisses[k], i)) return SoundnessWitness{static_cast<int>(k), i, false};
        return std::nullopt;
    };
    switch (r.rule) {
        case Rule::impR: {
            if (!pf || !pf->labelled() || r.premisses.size() != 1) break;
            Label x = pf->label();
            Formula f = pf->formula();
            auto ta = birel_truth(m, f->a), tb = birel_truth(m, f->b);
            for (int w = 0; w < n; ++w) {
                if (!m.leq[i.at(x)][w] || !ta[w] || tb[w]) continue;
                auto j = lift_interpretation(m, r.conclusion, i, x, w);
                if (j && fails(m, r.premisses[0], *j)) return SoundnessWitness{0, *j, false};
            }
            break;
        }
        case Rule::boxR: {
            if (!pf || !pf->labelled() || r.premisses.size() != 1 || !r.fresh) break;
            Label x = pf->label();
            auto ta = birel_truth(m, pf->formula()->a);
            for (int w = 0; w < n; ++w) {
                if (!m.leq[i.at(x)][w]) continue;
                for (int v = 0; v < n; ++v) {
                    if (!m.acc[w][v] || ta[v]) continue;
                    auto j = lift_interpretation(m, r.conclusion, i, x, w);
                    if (!j) continue;
                    (*j)[*r.fresh] = v;
                    if (fails(m, r.premisses[0], *j)) return SoundnessWitness{0, *j, false};
                }
            }
            break;
        }
        case Rule::diaL: {
            if (!pf || !pf->labelled() || r.premisses.size() != 1 || !r.fresh) break;
            Label x = pf->label();
            auto ta = birel_truth(m, pf->formula()->a);
            for (int v = 0; v < n; ++v) {
                if (!m.acc[i.at(x)][v] || !ta[v]) continue;
                Interpretation j = i;
                j[*r.fresh] = v;
                if (fails(m, r.premisses[0], j)) return SoundnessWitness{0, j, false};
            }
            break;
        }
        default:
            // impL, boxL, diaR, tr, weakening, contraction, the propositional
            // rules and cut keep the interpretation unchanged
            return same();
    }
    return std::nullopt;
}

}  // namespace

std::optional<SoundnessWitness> local_soundness_witness(const BirelModel& m, const RuleInstance& r,
                                                        const Interpretation& i) {
    if (auto w = construct(m, r, i)) return w;
    LabelSet old = labels(r.conclusion);
    for (std::size_t k = 0; k < r.premisses.size(); ++k) {
        std::optional<Interpretation> found;
        for_each_interpretation(m, r.premisses[k], [&](const Interpretation& j) {
            for (const auto& [l, w] : j)
                if (old.count(l) && !m.leq[i.at(l)][w]) return true;
            if (seq_satisfied(m, j, r.premisses[k])) return true;
            found = j;
            return false;
        });
        if (found) {
            Interpretation full = i;
            for (const auto& [l, w] : *found) full[l] = w;
            return SoundnessWitness{static_cast<int>(k), full, true};
        }
    }
    return std::nullopt;
}

}  // namespace igl
