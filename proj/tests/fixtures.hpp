#pragma once

// Hand-built certificates and models shared by the tests.

#include <optional>
#include <string>
#include <vector>

#include "igl/proof.hpp"
#include "igl/semantics.hpp"

namespace fixtures {

using namespace igl;

inline int put(CyclicProof& p, const std::string& seq, std::optional<Rule> rule, std::vector<int> prem = {},
               std::optional<Label> fresh = {}) {
    int id = p.add(parse_sequent(seq));
    p.nodes[id].rule = rule;
    p.nodes[id].premisses = std::move(prem);
    p.nodes[id].fresh = std::move(fresh);
    return id;
}

inline void back(CyclicProof& p, int leaf, int target, Renaming r) {
    p.nodes[leaf].backedge = BackEdge{target, std::move(r)};
}

// Loeb's axiom, one cycle through the bullet at node 2.
inline CyclicProof loeb_certificate(SystemId sys = SystemId::K4) {
    CyclicProof p;
    p.system = sys;
    const std::string g = "x:[]([]p -> p)";
    put(p, "=> x:[]([]p -> p) -> []p", Rule::impR, {1});
    put(p, g + " => x:[]p", Rule::boxR, {2}, "y");
    put(p, "xRy | " + g + " => y:p", Rule::cL, {3});
    put(p, "xRy | " + g + ", " + g + " => y:p", Rule::boxL, {4});
    put(p, "xRy | " + g + ", y:[]p -> p => y:p", Rule::impL, {5, 9});
    put(p, "xRy | " + g + " => y:[]p", Rule::boxR, {6}, "z");
    put(p, "xRy, yRz | " + g + " => z:p", Rule::tr, {7});
    put(p, "xRy, yRz, xRz | " + g + " => z:p", Rule::th, {8});
    int leaf = put(p, "xRz | " + g + " => z:p", std::nullopt);
    back(p, leaf, 2, {{"x", "x"}, {"y", "z"}});
    put(p, "xRy | " + g + ", y:p => y:p", Rule::id);
    return p;
}

// The contraposition of Loeb's axiom, classical multi-succedent K4.
inline CyclicProof contra_loeb_certificate() {
    CyclicProof p;
    p.system = SystemId::K4;
    const std::string d = "x:<>(p & []~p)";
    put(p, "=> x:<>p -> <>(p & []~p)", Rule::impR, {1});
    put(p, "x:<>p => " + d, Rule::diaL, {2}, "y");
    put(p, "xRy | y:p => " + d, Rule::diaR, {3});
    put(p, "xRy | y:p => " + d + ", y:p & []~p", Rule::andR, {4, 5});
    put(p, "xRy | y:p => " + d + ", y:p", Rule::id);
    put(p, "xRy | y:p => " + d + ", y:[]~p", Rule::boxR, {6}, "z");
    put(p, "xRy, yRz | y:p => " + d + ", z:~p", Rule::impR, {7});
    put(p, "xRy, yRz | y:p, z:p => " + d + ", z:false", Rule::wR, {8});
    put(p, "xRy, yRz | y:p, z:p => " + d, Rule::tr, {9});
    put(p, "xRy, yRz, xRz | y:p, z:p => " + d, Rule::th, {10});
    put(p, "xRz | y:p, z:p => " + d, Rule::wL, {11});
    int leaf = put(p, "xRz | z:p => " + d, std::nullopt);
    back(p, leaf, 2, {{"x", "x"}, {"y", "z"}});
    return p;
}

// The birelational model refuting contra-Loeb at w1: two R-chains w1 R w2
// and v1 R v2 R v3 joined by w1 <= v1, w2 <= v2, with p everywhere.
inline BirelModel example3_model() {
    BirelModel m = BirelModel::empty(5);
    m.names = {"w1", "w2", "v1", "v2", "v3"};
    auto R = [&](int a, int b) { m.acc[a][b] = 1; };
    auto L = [&](int a, int b) { m.leq[a][b] = 1; };
    R(0, 1);
    R(2, 3);
    R(3, 4);
    L(0, 2);
    L(1, 3);
    close_leq(m);
    close_acc(m);
    for (auto& v : m.val) v = {"p"};
    return m;
}

// n0: x:p => x:q  --cL-->  x:p, x:p => x:q  --wL-->  back to n0
inline CyclicProof idle_loop() {
    CyclicProof p;
    p.system = SystemId::IK4;
    put(p, "x:p => x:q", Rule::cL, {1});
    put(p, "x:p, x:p => x:q", Rule::wL, {2});
    int leaf = put(p, "x:p => x:q", std::nullopt);
    back(p, leaf, 0, {});
    return p;
}

inline const char* kLoeb = "[]([]p -> p) -> []p";
inline const char* kContraLoeb = "<>p -> <>(p & []~p)";

}  // namespace fixtures

#include <random>

namespace fixtures {

// Uniform-ish random formula of modal/propositional depth at most `depth`.
inline igl::Formula random_formula(std::mt19937& rng, int depth, const std::vector<std::string>& atoms) {
    using namespace igl;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    int k = pick(rng);
    if (depth <= 0 || k <= 1) {
        if (k == 1 && std::uniform_int_distribution<int>(0, 5)(rng) == 0) return bot();
        return atom(atoms[std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng)]);
    }
    auto sub = [&] { return random_formula(rng, depth - 1, atoms); };
    switch (k) {
        case 2: return conj(sub(), sub());
        case 3: return disj(sub(), sub());
        case 4: return imp(sub(), sub());
        case 5: return neg(sub());
        case 6: return box(sub());
        default: return dia(sub());
    }
}

}  // namespace fixtures
