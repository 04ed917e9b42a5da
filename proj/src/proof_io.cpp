#include <sstream>

#include "igl/proof.hpp"
#include "json.hpp"

namespace igl {

using nlohmann::ordered_json;

std::string proof_to_json(const CyclicProof& p, bool pretty) {
    ordered_json j;
    j["system"] = system_name(p.system);
    j["root"] = p.root;
    ordered_json nodes = ordered_json::array();
    for (int id = 0; id < static_cast<int>(p.nodes.size()); ++id) {
        const ProofNode& nd = p.nodes[id];
        ordered_json n;
        n["id"] = id;
        n["sequent"] = render_sequent(nd.sequent);
        n["rule"] = nd.rule ? rule_name(*nd.rule) : (nd.backedge ? "backedge" : "open");
        n["premisses"] = nd.premisses;
        ordered_json pr = ordered_json::array();
        for (const auto& pos : nd.principal)
            pr.push_back({{"side", pos.side == Side::L ? "L" : "R"}, {"index", pos.index}});
        n["principal"] = pr;
        if (nd.fresh) n["fresh"] = *nd.fresh;
        if (nd.cut_formula) {
            n["cut_formula"] = render(*nd.cut_formula);
            n["dis"] = nd.cut_formula->degree();
        }
        if (int d = max_degree(nd.sequent); d > 1) n["degree"] = d;
        if (nd.backedge) {
            ordered_json ren = ordered_json::object();
            for (const auto& [a, b] : nd.backedge->renaming) ren[a] = b;
            n["backedge"] = {{"target", nd.backedge->target}, {"renaming", ren}};
        }
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    return pretty ? j.dump(2) : j.dump();
}

CyclicProof proof_from_json(const std::string& text) {
    auto j = ordered_json::parse(text);
    CyclicProof p;
    p.system = parse_system(j.at("system").get<std::string>());
    // ids may be arbitrary integers; map them to positions
    std::map<int, int> index;
    const auto& nodes = j.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        index[nodes[i].at("id").get<int>()] = static_cast<int>(i);
    auto ix = [&](int id) {
        auto it = index.find(id);
        if (it == index.end()) throw std::invalid_argument("unknown node id " + std::to_string(id));
        return it->second;
    };
    p.root = ix(j.at("root").get<int>());
    for (const auto& n : nodes) {
        ProofNode nd;
        nd.sequent = parse_sequent(n.at("sequent").get<std::string>());
        std::string rule = n.value("rule", "open");
        if (rule != "backedge" && rule != "open") {
            auto r = parse_rule(rule);
            if (!r) throw std::invalid_argument("unknown rule " + rule);
            nd.rule = *r;
        }
        if (n.contains("premisses"))
            for (const auto& c : n["premisses"]) nd.premisses.push_back(ix(c.get<int>()));
        if (n.contains("principal")) {
            const auto& pr = n["principal"];
            auto one = [&](const ordered_json& x) {
                if (x.is_object())
                    nd.principal.push_back({x.at("side").get<std::string>() == "L" ? Side::L : Side::R,
                                            x.at("index").get<int>()});
            };
            if (pr.is_array())
                for (const auto& x : pr) one(x);
            else
                one(pr);
        }
        if (n.contains("fresh")) nd.fresh = n["fresh"].get<std::string>();
        if (n.contains("cut_formula")) nd.cut_formula = parse_disj(n["cut_formula"].get<std::string>());
        if (n.contains("backedge")) {
            BackEdge be;
            be.target = ix(n["backedge"].at("target").get<int>());
            if (n["backedge"].contains("renaming"))
                for (const auto& [a, b] : n["backedge"]["renaming"].items()) be.renaming[a] = b.get<std::string>();
            nd.backedge = be;
        }
        p.nodes.push_back(std::move(nd));
    }
    return p;
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += c;
    }
    return o;
}

bool has_progress(const TraceRelation& r) {
    for (const auto& e : r.edges)
        if (e.progress) return true;
    return false;
}

}  // namespace

std::string proof_to_dot(const CyclicProof& p) {
    std::ostringstream os;
    os << "digraph proof {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n";
    for (int id = 0; id < static_cast<int>(p.nodes.size()); ++id) {
        const auto& nd = p.nodes[id];
        std::string tag = nd.rule ? rule_name(*nd.rule) : (nd.backedge ? "back" : "open");
        os << "  n" << id << " [label=\"" << id << " [" << tag << "]\\n"
           << dot_escape(render_sequent(nd.sequent)) << "\"];\n";
    }
    for (int id = 0; id < static_cast<int>(p.nodes.size()); ++id) {
        const auto& nd = p.nodes[id];
        for (int c : nd.premisses) {
            bool prog = has_progress(edge_trace_relation(p, id, c));
            os << "  n" << id << " -> n" << c << (prog ? " [color=red]" : "") << ";\n";
        }
        if (nd.backedge) {
            bool prog = has_progress(edge_trace_relation(p, id, nd.backedge->target));
            std::string ren;
            for (const auto& [a, b] : nd.backedge->renaming)
                if (a != b) ren += (ren.empty() ? "" : ",") + b + "/" + a;
            os << "  n" << id << " -> n" << nd.backedge->target << " [style=dashed"
               << (prog ? ", color=red" : "") << ", label=\"[" << dot_escape(ren) << "]\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace igl
