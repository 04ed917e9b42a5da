#include <algorithm>
#include <numeric>

#include "igl/semantics.hpp"

namespace igl {

namespace {

using Matrix = std::vector<std::vector<char>>;

// Strict partial orders on n points (irreflexive and transitive).
std::vector<Matrix> strict_orders(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) pairs.push_back({a, b});
    std::vector<Matrix> out;
    Matrix r(n, std::vector<char>(n, 0));
    // backtracking with a transitivity check over assigned pairs
    std::function<void(std::size_t)> go = [&](std::size_t k) {
        if (k == pairs.size()) {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (r[a][b])
                        for (int c = 0; c < n; ++c)
                            if (r[b][c] && !r[a][c]) return;
            out.push_back(r);
            return;
        }
        auto [a, b] = pairs[k];
        for (char v : {0, 1}) {
            r[a][b] = v;
            if (v && r[b][a]) continue;  // asymmetric
            go(k + 1);
        }
        r[a][b] = 0;
    };
    go(0);
    return out;
}

// Partial orders whose strict part sits above the diagonal. Every poset is
// isomorphic to one of these (take a linear extension).
std::vector<Matrix> triangular_posets(int n) {
    std::vector<Matrix> out;
    for (const auto& s : strict_orders(n)) {
        bool tri = true;
        for (int a = 0; a < n && tri; ++a)
            for (int b = 0; b < a && tri; ++b)
                if (s[a][b]) tri = false;
        if (!tri) continue;
        Matrix l = s;
        for (int a = 0; a < n; ++a) l[a][a] = 1;
        out.push_back(l);
    }
    return out;
}

bool frame_ok(const Matrix& leq, const Matrix& acc, int n) {
    // F1, F2
    for (int w = 0; w < n; ++w)
        for (int v = 0; v < n; ++v) {
            if (!acc[w][v]) continue;
            for (int w2 = 0; w2 < n; ++w2) {
                if (!leq[w][w2]) continue;
                bool ok = false;
                for (int v2 = 0; v2 < n && !ok; ++v2) ok = leq[v][v2] && acc[w2][v2];
                if (!ok) return false;
            }
            for (int v2 = 0; v2 < n; ++v2) {
                if (!leq[v][v2]) continue;
                bool ok = false;
                for (int w2 = 0; w2 < n && !ok; ++w2) ok = leq[w][w2] && acc[w2][v2];
                if (!ok) return false;
            }
        }
    // (leq;acc) acyclic: its transitive closure is irreflexive
    Matrix c(n, std::vector<char>(n, 0));
    for (int a = 0; a < n; ++a)
        for (int u = 0; u < n; ++u)
            if (leq[a][u])
                for (int b = 0; b < n; ++b)
                    if (acc[u][b]) c[a][b] = 1;
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
            if (c[a][k])
                for (int b = 0; b < n; ++b)
                    if (c[k][b]) c[a][b] = 1;
    for (int a = 0; a < n; ++a)
        if (c[a][a]) return false;
    return true;
}

std::string frame_code(const Matrix& leq, const Matrix& acc, const std::vector<int>& p) {
    int n = static_cast<int>(p.size());
    std::string s;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            s += char('0' + leq[p[a]][p[b]]);
            s += char('0' + acc[p[a]][p[b]]);
        }
    return s;
}

std::string model_code(const BirelModel& m, const std::vector<int>& p) {
    std::string s = frame_code(m.leq, m.acc, p);
    for (int a = 0; a < static_cast<int>(p.size()); ++a) {
        s += '|';
        for (const auto& v : m.val[p[a]]) s += v + ",";
    }
    return s;
}

}  // namespace

std::string canonical_form(const BirelModel& m) {
    std::vector<int> p(m.size());
    std::iota(p.begin(), p.end(), 0);
    std::string best;
    bool first = true;
    do {
        std::string c = std::to_string(m.size()) + ":" + model_code(m, p);
        if (first || c < best) best = c;
        first = false;
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

void enumerate_igl_models(int max_worlds, const std::vector<std::string>& atoms,
                          const std::function<bool(const BirelModel&)>& f) {
    for (int n = 1; n <= max_worlds; ++n) {
        auto posets = triangular_posets(n);
        auto orders = strict_orders(n);
        std::vector<std::vector<int>> perms;
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));

        std::set<std::string> frames;
        for (const auto& leq : posets) {
            // up-sets of leq, as bitmasks
            std::vector<unsigned> upsets;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                bool up = true;
                for (int a = 0; a < n && up; ++a)
                    for (int b = 0; b < n && up; ++b)
                        if ((mask >> a & 1) && leq[a][b] && !(mask >> b & 1)) up = false;
                if (up) upsets.push_back(mask);
            }
            for (const auto& acc : orders) {
                if (!frame_ok(leq, acc, n)) continue;
                std::string canon;
                std::vector<std::vector<int>> autos;
                for (const auto& q : perms) {
                    std::string c = frame_code(leq, acc, q);
                    if (canon.empty() || c < canon) canon = c;
                }
                if (!frames.insert(canon).second) continue;
                std::string self = frame_code(leq, acc, perms.front());
                for (const auto& q : perms)
                    if (frame_code(leq, acc, q) == self) autos.push_back(q);

                // valuations up to automorphisms of the frame
                std::set<std::string> seen;
                std::vector<std::size_t> choice(atoms.size(), 0);
                BirelModel m = BirelModel::empty(n);
                m.leq = leq;
                m.acc = acc;
                while (true) {
                    for (int w = 0; w < n; ++w) m.val[w].clear();
                    for (std::size_t a = 0; a < atoms.size(); ++a)
                        for (int w = 0; w < n; ++w)
                            if (upsets[choice[a]] >> w & 1) m.val[w].insert(atoms[a]);
                    std::string best;
                    for (const auto& q : autos) {
                        std::string c = model_code(m, q);
                        if (best.empty() || c < best) best = c;
                    }
                    if (seen.insert(best).second)
                        if (!f(m)) return;
                    std::size_t a = 0;
                    while (a < atoms.size() && ++choice[a] == upsets.size()) choice[a++] = 0;
                    if (a == atoms.size()) break;
                }
            }
        }
    }
}

std::vector<BirelModel> enumerate_igl_models(int max_worlds, const std::vector<std::string>& atoms) {
    std::vector<BirelModel> out;
    enumerate_igl_models(max_worlds, atoms, [&](const BirelModel& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

}  // namespace igl
