#pragma once

// Brute-force progress oracle for proofs with one back-edge: builds the
// product graph (position on the cycle, label) straight from the trace
// clauses and looks for a strongly connected component with a progress edge.
// Shares nothing with the checker beyond the proof data structure.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "igl/proof.hpp"

namespace oracle {

using namespace igl;

struct Edge {
    int from, to;
    bool progress;
};

// Tree path from `top` down to `leaf`, or empty if `leaf` is not below `top`.
inline std::vector<int> tree_path(const CyclicProof& p, int top, int leaf) {
    std::vector<int> path;
    std::function<bool(int)> go = [&](int v) {
        path.push_back(v);
        if (v == leaf) return true;
        if (!p.nodes[v].backedge)
            for (int c : p.nodes[v].premisses)
                if (go(c)) return true;
        path.pop_back();
        return false;
    };
    go(top);
    return path;
}

inline std::set<Label> label_set(const Sequent& s) {
    std::set<Label> out;
    for (const auto& l : labels(s)) out.insert(l);
    return out;
}

// nullopt: the leaf's back-edge closes no cycle. Otherwise whether the
// repeated cycle carries a trace with infinitely many progress points.
inline std::optional<bool> cycle_has_progress(const CyclicProof& p, int leaf) {
    const auto& be = *p.nodes[leaf].backedge;
    std::vector<int> path = tree_path(p, be.target, leaf);
    if (path.empty()) return std::nullopt;
    int k = static_cast<int>(path.size());

    std::map<std::pair<int, Label>, int> id;
    auto vid = [&](int pos, const Label& l) {
        auto key = std::make_pair(pos, l);
        auto it = id.find(key);
        if (it != id.end()) return it->second;
        int n = static_cast<int>(id.size());
        id[key] = n;
        return n;
    };
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < k; ++i) {
        const Sequent& a = p.nodes[path[i]].sequent;
        const Sequent& b = p.nodes[path[i + 1]].sequent;
        auto la = label_set(a), lb = label_set(b);
        for (const auto& v : la)
            if (lb.count(v)) edges.push_back({vid(i, v), vid(i + 1, v), false});
        for (const auto& [x, y] : a.rel)
            if (lb.count(y)) edges.push_back({vid(i, x), vid(i + 1, y), true});
    }
    // leaf back to the target: target label u is leaf label sigma(u)
    const Sequent& lf = p.nodes[leaf].sequent;
    const Sequent& tg = p.nodes[be.target].sequent;
    auto lleaf = label_set(lf);
    // a renaming that identifies two labels lets no trace through
    std::map<Label, Label> sigma;
    std::set<Label> image;
    for (const auto& u : label_set(tg)) {
        auto it = be.renaming.find(u);
        sigma[u] = it == be.renaming.end() ? u : it->second;
        if (!image.insert(sigma[u]).second) return false;
    }
    for (const auto& [u, su] : sigma) {
        if (lleaf.count(su)) edges.push_back({vid(k - 1, su), vid(0, u), false});
        for (const auto& [x, y] : lf.rel)
            if (y == su) edges.push_back({vid(k - 1, x), vid(0, u), true});
    }

    // SCCs by mutual reachability (graphs here are tiny)
    int n = static_cast<int>(id.size());
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (int v = 0; v < n; ++v) reach[v][v] = 1;
    for (const auto& e : edges) reach[e.from][e.to] = 1;
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a)
            if (reach[a][m])
                for (int b = 0; b < n; ++b)
                    if (reach[m][b]) reach[a][b] = 1;
    for (const auto& e : edges)
        if (e.progress && reach[e.to][e.from]) return true;
    return false;
}

struct Mutant {
    std::string what;
    CyclicProof proof;
};

// Every single relational-atom deletion, and every redirection of each
// back-edge to another node (renaming kept).
inline std::vector<Mutant> mutants(const CyclicProof& p) {
    std::vector<Mutant> out;
    for (int v = 0; v < static_cast<int>(p.nodes.size()); ++v)
        for (const auto& a : p.nodes[v].sequent.rel) {
            CyclicProof q = p;
            q.nodes[v].sequent.rel.erase(a);
            out.push_back({"drop " + a.first + "R" + a.second + " at node " + std::to_string(v), q});
        }
    for (int v = 0; v < static_cast<int>(p.nodes.size()); ++v) {
        if (!p.nodes[v].backedge) continue;
        for (int t = 0; t < static_cast<int>(p.nodes.size()); ++t) {
            if (t == p.nodes[v].backedge->target || t == v) continue;
            CyclicProof q = p;
            q.nodes[v].backedge->target = t;
            out.push_back({"redirect back-edge at node " + std::to_string(v) + " to node " + std::to_string(t), q});
        }
    }
    return out;
}

inline int the_backedge(const CyclicProof& p) {
    for (int v = 0; v < static_cast<int>(p.nodes.size()); ++v)
        if (p.nodes[v].backedge) return v;
    return -1;
}

}  // namespace oracle
