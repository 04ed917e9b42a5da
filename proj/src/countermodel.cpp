#include "igl/countermodel.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace igl {

namespace {

// Tarjan's SCCs; components come out in reverse topological order.
std::vector<int> scc(const std::vector<std::vector<int>>& g, int& count) {
    int n = static_cast<int>(g.size()), idx = 0;
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<char> on(n, 0);
    count = 0;
    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = idx++;
        stack.push_back(v);
        on[v] = 1;
        for (int w : g[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = 0;
                comp[w] = count;
            } while (w != v);
            ++count;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comp;
}

Environment identity_env(const Sequent& s) {
    Environment e;
    for (const auto& l : labels(s)) e[l] = l;
    return e;
}

}  // namespace

Countermodel extract_countermodel(const DenierTree& d) {
    if (auto why = validate_denier_tree(d)) throw std::invalid_argument("not a Denier tree: " + *why);
    Countermodel cm;
    int n = static_cast<int>(d.nodes.size());
    std::vector<int> seg_of(n, -1);

    // segments by walking Step chains from each segment start
    std::vector<std::pair<int, int>> starts{{d.root, -1}};
    for (std::size_t i = 0; i < starts.size(); ++i) {
        auto [start, parent] = starts[i];
        Segment seg;
        seg.id = static_cast<int>(cm.segments.size());
        seg.parent = parent;
        int cur = start;
        while (true) {
            seg.nodes.push_back(cur);
            seg_of[cur] = seg.id;
            if (d.nodes[cur].kind != DenierNode::Kind::Step) break;
            cur = d.nodes[cur].children.front();
        }
        seg.final_node = cur;
        for (int c : d.nodes[cur].children) starts.push_back({c, seg.id});
        cm.segments.push_back(std::move(seg));
    }

    int m = static_cast<int>(cm.segments.size());
    std::vector<std::vector<int>> g(m);
    for (const auto& s : cm.segments) {
        if (s.parent >= 0) g[s.parent].push_back(s.id);
        const auto& fin = d.nodes[s.final_node];
        if (fin.kind == DenierNode::Kind::Loop) g[s.id].push_back(seg_of[fin.loop_target]);
    }
    int worlds = 0;
    std::vector<int> comp = scc(g, worlds);
    // number worlds from the root outwards
    std::vector<int> rename_world(worlds, -1);
    int next = 0;
    for (const auto& s : cm.segments)
        if (rename_world[comp[s.id]] < 0) rename_world[comp[s.id]] = next++;
    cm.world_of_segment.resize(m);
    for (int i = 0; i < m; ++i) cm.world_of_segment[i] = rename_world[comp[i]];

    KripkeStructure& k = cm.structure;
    k.names.resize(worlds);
    k.leq.assign(worlds, std::vector<char>(worlds, 0));
    k.domain.assign(worlds, {});
    k.pred.assign(worlds, {});
    k.rel.assign(worlds, {});
    for (int w = 0; w < worlds; ++w) k.names[w] = "w" + std::to_string(w);

    for (const auto& s : cm.segments) {
        int w = cm.world_of_segment[s.id];
        const Sequent& fin = d.nodes[s.final_node].sequent;
        cm.provenance[k.names[w]].push_back(s.id);
        // a cluster shares R and Gamma, so the union is harmless
        std::set<Element> dom(k.domain[w].begin(), k.domain[w].end());
        for (const auto& l : labels(fin)) dom.insert(l);
        k.domain[w].assign(dom.begin(), dom.end());
        for (const auto& a : fin.rel) k.rel[w].insert(a);
        for (const auto& f : fin.lhs)
            if (f.labelled() && f.formula()->op == Op::Atom) k.pred[w][f.formula()->name].insert(f.label());
    }
    for (auto& dom : k.domain) {
        std::sort(dom.begin(), dom.end(), LabelLess{});
    }
    for (int a = 0; a < m; ++a) {
        int wa = cm.world_of_segment[a];
        k.leq[wa][wa] = 1;
        for (int b : g[a]) k.leq[wa][cm.world_of_segment[b]] = 1;
    }
    for (int c = 0; c < worlds; ++c)
        for (int a = 0; a < worlds; ++a)
            if (k.leq[a][c])
                for (int b = 0; b < worlds; ++b)
                    if (k.leq[c][b]) k.leq[a][b] = 1;
    cm.root = cm.world_of_segment[0];
    cm.env = identity_env(d.nodes[d.root].sequent);
    return cm;
}

CountermodelCheck verify_countermodel(const KripkeStructure& k, int root, const Environment& env, Formula goal) {
    CountermodelCheck r;
    if (auto bad = check_kripke_structure(k)) return {false, "not a Kripke structure: " + *bad};
    ClassReport cls = check_igl_pred_class(k);
    if (!cls.ok) return {false, "not in IGL^pred: " + cls.message};
    if (!env.count(kRootLabel)) return {false, "environment misses " + kRootLabel};
    if (kripke_satisfies(k, root, env, kRootLabel, goal))
        return {false, "goal holds at " + k.names[root]};
    return r;
}

CountermodelCheck verify_segments(const Countermodel& cm, const DenierTree& d) {
    const KripkeStructure& k = cm.structure;
    for (const auto& s : cm.segments) {
        int w = cm.world_of_segment[s.id];
        for (int id : s.nodes) {
            const Sequent& q = d.nodes[id].sequent;
            Environment env = identity_env(q);
            std::string at = " at " + k.names[w] + " (Denier node " + std::to_string(id) + ")";
            for (const auto& f : q.lhs) {
                if (!f.labelled()) return {false, "disjunction on the left" + at};
                if (!k.in_domain(w, f.label())) return {false, f.label() + " not in the domain" + at};
                if (!kripke_satisfies(k, w, env, f.label(), f.formula()))
                    return {false, "left formula " + render(f) + " fails" + at};
            }
            for (const auto& f : q.rhs)
                for (const auto& lf : f.ds) {
                    if (!k.in_domain(w, lf.label)) return {false, lf.label + " not in the domain" + at};
                    if (kripke_satisfies(k, w, env, lf.label, lf.formula))
                        return {false, "right formula " + render(lf) + " holds" + at};
                }
        }
    }
    return {};
}

std::string countermodel_to_json(const Countermodel& cm, bool pretty) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["structure"] = ordered_json::parse(kripke_to_json(cm.structure));
    j["root"] = cm.structure.names[cm.root];
    ordered_json env = ordered_json::object();
    for (const auto& [l, e] : cm.env) env[l] = e;
    j["env"] = env;
    ordered_json prov = ordered_json::object();
    for (const auto& [w, segs] : cm.provenance) {
        ordered_json paths = ordered_json::array();
        for (int s : segs) paths.push_back(cm.segments[s].nodes);
        prov[w] = paths;
    }
    j["provenance"] = prov;
    return pretty ? j.dump(2) : j.dump();
}

}  // namespace igl
