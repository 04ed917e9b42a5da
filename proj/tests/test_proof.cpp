#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "igl/proof.hpp"
#include "trace_oracle.hpp"

using namespace igl;
using fixtures::put;

namespace {

bool has_edge(const TraceRelation& r, const Label& x, const Label& y, bool prog) {
    return std::any_of(r.edges.begin(), r.edges.end(),
                       [&](const TraceEdge& e) { return e.x == x && e.y == y && e.progress == prog; });
}

}  // namespace

TEST(CheckLocal, LoebCertificate) {
    for (SystemId s : {SystemId::K4, SystemId::IK4, SystemId::mIK4}) {
        LocalReport r = check_local(fixtures::loeb_certificate(s));
        EXPECT_TRUE(r.ok) << system_name(s) << ": " << (r.violations.empty() ? "" : r.violations[0].message);
    }
}

TEST(CheckLocal, ContraLoebNeedsClassicalRight) {
    CyclicProof p = fixtures::contra_loeb_certificate();
    EXPECT_TRUE(check_local(p).ok);
    p.system = SystemId::IK4;
    EXPECT_FALSE(check_local(p).ok);
}

TEST(CheckLocal, CorruptedRenamingRejectedAtBackEdge) {
    CyclicProof p = fixtures::loeb_certificate();
    int leaf = oracle::the_backedge(p);
    p.nodes[leaf].backedge->renaming = {{"x", "x"}, {"y", "y"}};
    LocalReport r = check_local(p);
    ASSERT_FALSE(r.ok);
    EXPECT_TRUE(std::any_of(r.violations.begin(), r.violations.end(),
                            [&](const Violation& v) { return v.node == leaf; }));
}

TEST(CheckLocal, BoxRWithOldLabel) {
    CyclicProof p;
    p.system = SystemId::IK4;
    put(p, "y:q => x:[]q", Rule::boxR, {1}, "y");
    put(p, "xRy | y:q => y:q", Rule::id);
    LocalReport r = check_local(p);
    ASSERT_FALSE(r.ok);
    EXPECT_NE(r.violations[0].message.find("fresh"), std::string::npos);
}

TEST(CheckLocal, UnreachableNode) {
    CyclicProof p;
    put(p, "x:p => x:p", Rule::id);
    put(p, "x:q => x:q", Rule::id);
    EXPECT_FALSE(check_local(p).ok);
}

TEST(Trace, TransitivityStep) {
    CyclicProof p;
    p.system = SystemId::K4;
    put(p, "xRy, yRz | => z:p", Rule::tr, {1});
    put(p, "xRy, yRz, xRz | => z:p", std::nullopt);
    TraceRelation r = edge_trace_relation(p, 0, 1);
    for (const char* v : {"x", "y", "z"}) EXPECT_TRUE(has_edge(r, v, v, false)) << v;
    EXPECT_TRUE(has_edge(r, "x", "y", true));
    EXPECT_TRUE(has_edge(r, "y", "z", true));
}

TEST(Trace, LoebBackEdgeRenames) {
    CyclicProof p = fixtures::loeb_certificate();
    int leaf = oracle::the_backedge(p);
    TraceRelation r = edge_trace_relation(p, leaf, 2);
    EXPECT_TRUE(has_edge(r, "z", "y", false));
    EXPECT_TRUE(has_edge(r, "x", "x", false));
    EXPECT_TRUE(has_edge(r, "x", "y", true));  // xRz at the leaf
}

TEST(Trace, IdentityLeafHasNoRelation) {
    CyclicProof p = fixtures::loeb_certificate();
    EXPECT_TRUE(p.nodes[9].premisses.empty());
    EXPECT_EQ(count_backedges(p), 1u);
}

TEST(Progress, FigureTwoAccepted) {
    EXPECT_TRUE(check_progress(fixtures::loeb_certificate()).progressing);
    EXPECT_TRUE(check_progress(fixtures::contra_loeb_certificate()).progressing);
}

TEST(Progress, IdleLoopRejectedWithWitness) {
    CyclicProof p = fixtures::idle_loop();
    EXPECT_TRUE(check_local(p).ok);
    ProgressReport r = check_progress(p);
    EXPECT_FALSE(r.progressing);
    ASSERT_GE(r.witness.size(), 2u);
    EXPECT_EQ(r.witness.front(), r.witness.back());
    EXPECT_TRUE(no_progressing_cycle(p));
}

TEST(Progress, FiniteProofVacuous) {
    CyclicProof p;
    put(p, "=> x:p -> p", Rule::impR, {1});
    put(p, "x:p => x:p", Rule::id);
    EXPECT_TRUE(check_progress(p).progressing);
}

TEST(Progress, SingleCycleHelpers) {
    CyclicProof p = fixtures::loeb_certificate();
    int leaf = oracle::the_backedge(p);
    // compose the tree path 2 -> ... -> leaf and the back-edge
    std::vector<int> path = oracle::tree_path(p, 2, leaf);
    TraceRelation r = edge_trace_relation(p, path[0], path[1]);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) r = compose(r, edge_trace_relation(p, path[i], path[i + 1]));
    r = compose(r, edge_trace_relation(p, leaf, 2));
    EXPECT_TRUE(cycle_progresses(r));
    EXPECT_FALSE(cycle_never_progresses(r));
}

TEST(Progress, MutantsAgreeWithOracle) {
    int rejected = 0, count = 0;
    for (const CyclicProof& base : {fixtures::loeb_certificate(), fixtures::contra_loeb_certificate()}) {
        for (const auto& m : oracle::mutants(base)) {
            ++count;
            auto truth = oracle::cycle_has_progress(m.proof, oracle::the_backedge(m.proof));
            ProgressReport r = check_progress(m.proof);
            bool expect = !truth || *truth;
            EXPECT_EQ(r.progressing, expect) << m.what;
            if (!r.progressing) {
                ++rejected;
                EXPECT_FALSE(r.witness.empty()) << m.what;
            }
        }
    }
    EXPECT_GE(count, 20);
    EXPECT_GT(rejected, 0);
}

TEST(Thinning, SplicedOut) {
    CyclicProof p = fixtures::loeb_certificate();
    ASSERT_TRUE(uses_rule(p, Rule::th));
    ThinningResult t = eliminate_thinning(p);
    ASSERT_TRUE(t.ok) << t.error;
    EXPECT_EQ(t.removed, 1u);
    EXPECT_FALSE(uses_rule(t.proof, Rule::th));
    EXPECT_TRUE(same_sequent(t.proof.conclusion(), p.conclusion()));
    EXPECT_TRUE(check_local(t.proof).ok);
    EXPECT_TRUE(check_progress(t.proof).progressing);
}

TEST(Thinning, NoThIsIdentity) {
    CyclicProof p;
    put(p, "=> x:p -> p", Rule::impR, {1});
    put(p, "x:p => x:p", Rule::id);
    ThinningResult t = eliminate_thinning(p);
    ASSERT_TRUE(t.ok);
    EXPECT_EQ(t.removed, 0u);
    EXPECT_EQ(proof_to_json(t.proof), proof_to_json(p));
}

TEST(Unfold, DepthZeroIsRoot) {
    auto u = unfold(fixtures::loeb_certificate(), 0);
    ASSERT_EQ(u.size(), 1u);
    EXPECT_EQ(u[0].origin, 0);
}

TEST(Unfold, LoebTwiceAround) {
    CyclicProof p = fixtures::loeb_certificate();
    auto u = unfold(p, 16);
    int visits = 0;
    std::set<Label> goal_labels;
    for (const auto& n : u)
        if (n.origin == 2) {
            ++visits;
            goal_labels.insert(n.sequent.rhs[0].label());
        }
    EXPECT_GE(visits, 2);
    EXPECT_GE(goal_labels.size(), 2u);  // the second round uses renamed labels
}

TEST(Unfold, FiniteProofComplete) {
    CyclicProof p;
    put(p, "=> x:p -> p", Rule::impR, {1});
    put(p, "x:p => x:p", Rule::id);
    EXPECT_EQ(unfold(p, 10).size(), 2u);
}

TEST(Json, RoundTrip) {
    for (const CyclicProof& p : {fixtures::loeb_certificate(), fixtures::contra_loeb_certificate()}) {
        std::string j = proof_to_json(p);
        CyclicProof q = proof_from_json(j);
        EXPECT_EQ(proof_to_json(q), j);
        EXPECT_TRUE(check_local(q).ok);
    }
}

TEST(Json, Dot) {
    std::string dot = proof_to_dot(fixtures::loeb_certificate());
    EXPECT_NE(dot.find("digraph"), std::string::npos);
}

TEST(CompleteRenaming, ExtendsByIdentity) {
    Sequent target = parse_sequent("xRy | x:[]p => y:p");
    Sequent here = parse_sequent("xRz | x:[]p => z:p");
    auto r = complete_renaming(target, here, {{"y", "z"}});
    ASSERT_TRUE(r);
    EXPECT_EQ(r->at("x"), "x");
    EXPECT_EQ(r->at("y"), "z");
}
