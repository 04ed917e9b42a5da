#include <sstream>

#include "igl/semantics.hpp"
#include "json.hpp"

namespace igl {

using nlohmann::ordered_json;

namespace {

std::vector<std::vector<char>> matrix_from(const ordered_json& pairs, const std::vector<std::string>& names,
                                           const std::function<int(const std::string&)>& world) {
    int n = static_cast<int>(names.size());
    std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
    for (const auto& p : pairs) r[world(p.at(0).get<std::string>())][world(p.at(1).get<std::string>())] = 1;
    return r;
}

ordered_json pairs_of(const std::vector<std::vector<char>>& r, const std::vector<std::string>& names) {
    ordered_json out = ordered_json::array();
    for (std::size_t a = 0; a < r.size(); ++a)
        for (std::size_t b = 0; b < r.size(); ++b)
            if (r[a][b]) out.push_back({names[a], names[b]});
    return out;
}

void close_reflexive_transitive(std::vector<std::vector<char>>& r) {
    int n = static_cast<int>(r.size());
    for (int i = 0; i < n; ++i) r[i][i] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (r[i][k])
                for (int j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = 1;
}

}  // namespace

std::string model_to_json(const BirelModel& m, bool pretty) {
    ordered_json j;
    j["worlds"] = m.names;
    j["leq"] = pairs_of(m.leq, m.names);
    j["acc"] = pairs_of(m.acc, m.names);
    ordered_json val = ordered_json::object();
    for (int w = 0; w < m.size(); ++w) val[m.names[w]] = std::vector<std::string>(m.val[w].begin(), m.val[w].end());
    j["val"] = val;
    return pretty ? j.dump(2) : j.dump();
}

BirelModel model_from_json(const std::string& text) {
    auto j = ordered_json::parse(text);
    BirelModel m;
    m.names = j.at("worlds").get<std::vector<std::string>>();
    auto world = [&](const std::string& s) { return m.world(s); };
    m.leq = matrix_from(j.value("leq", ordered_json::array()), m.names, world);
    m.acc = matrix_from(j.value("acc", ordered_json::array()), m.names, world);
    close_reflexive_transitive(m.leq);
    m.val.assign(m.names.size(), {});
    if (j.contains("val"))
        for (const auto& [w, ps] : j["val"].items())
            for (const auto& p : ps) m.val[m.world(w)].insert(p.get<std::string>());
    return m;
}

std::string model_to_dot(const BirelModel& m) {
    std::ostringstream os;
    os << "digraph model {\n";
    for (int w = 0; w < m.size(); ++w) {
        os << "  w" << w << " [label=\"" << m.names[w];
        std::string sep = ": ";
        for (const auto& p : m.val[w]) {
            os << sep << p;
            sep = ",";
        }
        os << "\"];\n";
    }
    for (int a = 0; a < m.size(); ++a)
        for (int b = 0; b < m.size(); ++b) {
            if (a != b && m.leq[a][b]) os << "  w" << a << " -> w" << b << " [style=dashed, label=\"<=\"];\n";
            if (m.acc[a][b]) os << "  w" << a << " -> w" << b << " [label=\"R\"];\n";
        }
    os << "}\n";
    return os.str();
}

std::string kripke_to_json(const KripkeStructure& k, bool pretty) {
    ordered_json j;
    j["worlds"] = k.names;
    j["leq"] = pairs_of(k.leq, k.names);
    ordered_json dom = ordered_json::object(), pred = ordered_json::object(), rel = ordered_json::object();
    for (int w = 0; w < k.size(); ++w) {
        dom[k.names[w]] = k.domain[w];
        ordered_json pw = ordered_json::object();
        for (const auto& [p, ds] : k.pred[w]) pw[p] = std::vector<Element>(ds.begin(), ds.end());
        pred[k.names[w]] = pw;
        ordered_json rw = ordered_json::array();
        for (const auto& [a, b] : k.rel[w]) rw.push_back({a, b});
        rel[k.names[w]] = rw;
    }
    j["domain"] = dom;
    j["pred"] = pred;
    j["rel"] = rel;
    return pretty ? j.dump(2) : j.dump();
}

KripkeStructure kripke_from_json(const std::string& text) {
    auto j = ordered_json::parse(text);
    KripkeStructure k;
    k.names = j.at("worlds").get<std::vector<std::string>>();
    auto world = [&](const std::string& s) { return k.world(s); };
    k.leq = matrix_from(j.value("leq", ordered_json::array()), k.names, world);
    close_reflexive_transitive(k.leq);
    int n = k.size();
    k.domain.assign(n, {});
    k.pred.assign(n, {});
    k.rel.assign(n, {});
    for (const auto& [w, ds] : j.at("domain").items()) k.domain[k.world(w)] = ds.get<std::vector<Element>>();
    if (j.contains("pred"))
        for (const auto& [w, tab] : j["pred"].items())
            for (const auto& [p, ds] : tab.items())
                for (const auto& d : ds) k.pred[k.world(w)][p].insert(d.get<Element>());
    if (j.contains("rel"))
        for (const auto& [w, es] : j["rel"].items())
            for (const auto& e : es) k.rel[k.world(w)].insert({e.at(0).get<Element>(), e.at(1).get<Element>()});
    return k;
}

}  // namespace igl
