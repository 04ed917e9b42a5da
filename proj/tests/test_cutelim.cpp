#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "igl/cutelim.hpp"
#include "igl/prover.hpp"

using namespace igl;
using fixtures::put;

namespace {

CyclicProof migl_loeb() {
    SearchConfig c;
    c.system = SystemId::mIK4;
    return *prove(parse_formula(fixtures::kLoeb), c).proof;
}

// x:p => x:p by a degree-2 cut on x:p \/ x:q; the left side ends in dis-orR.
CyclicProof small_cut() {
    CyclicProof p;
    p.system = SystemId::dIK4;
    put(p, "x:p => x:p", Rule::cut, {1, 3});
    put(p, "x:p => x:p \\/ x:q", Rule::dis_orR, {2});
    put(p, "x:p => x:p", Rule::id);
    put(p, "x:p, x:p \\/ x:q => x:p", Rule::dis_orL, {4, 5});
    put(p, "x:p, x:p => x:p", Rule::id);
    put(p, "x:p, x:q => x:p", Rule::id);
    p.nodes[0].cut_formula = parse_disj("x:p \\/ x:q");
    return p;
}

bool labelled_only(const CyclicProof& p) {
    for (const auto& n : p.nodes) {
        if (max_degree(n.sequent) > 1) return false;
        if (n.cut_formula && n.cut_formula->degree() > 1) return false;
    }
    return true;
}

std::size_t max_rhs(const CyclicProof& p) {
    std::size_t m = 0;
    for (const auto& n : p.nodes) m = std::max(m, n.sequent.rhs.size());
    return m;
}

}  // namespace

TEST(Degree, Basics) {
    EXPECT_EQ(degree_of(fixtures::loeb_certificate()), 0);
    CyclicProof c = small_cut();
    ASSERT_TRUE(check_local(c).ok) << check_local(c).violations[0].message;
    EXPECT_EQ(degree_of(c), 2);
    ASSERT_EQ(cuts_of(c).size(), 1u);
    EXPECT_EQ(cuts_of(c)[0].node, 0);
}

TEST(Embed, SingleSuccedentAddsNoCuts) {
    CyclicProof p = fixtures::loeb_certificate(SystemId::IK4);
    CyclicProof e = embed_multisuccedent(p);
    EXPECT_EQ(e.system, SystemId::dIK4);
    EXPECT_TRUE(cuts_of(e).empty());
    EXPECT_EQ(e.nodes.size(), p.nodes.size());
    EXPECT_TRUE(check_local(e).ok);
    EXPECT_TRUE(check_progress(e).progressing);
}

TEST(Embed, LoebDegreeBoundedByWidth) {
    CyclicProof p = migl_loeb();
    CyclicProof e = embed_multisuccedent(p);
    LocalReport lr = check_local(e);
    ASSERT_TRUE(lr.ok) << lr.violations[0].message;
    EXPECT_TRUE(check_progress(e).progressing);
    EXPECT_GE(degree_of(e), 2);
    EXPECT_LE(static_cast<std::size_t>(degree_of(e)), max_rhs(p));
    EXPECT_TRUE(same_sequent(e.conclusion(), p.conclusion()));
}

TEST(Embed, RepeatedFormulaOneDisjunct) {
    CyclicProof p;
    p.system = SystemId::mIK4;
    put(p, "x:p => x:p, x:p", Rule::wR, {1});
    put(p, "x:p => x:p", Rule::id);
    CyclicProof e = embed_multisuccedent(p);
    EXPECT_EQ(e.conclusion().rhs.size(), 1u);
    EXPECT_EQ(e.conclusion().rhs[0].degree(), 1u);
    EXPECT_TRUE(check_local(e).ok);
}

TEST(Embed, RejectsCuts) { EXPECT_THROW(embed_multisuccedent(small_cut()), CutError); }

TEST(Embed, RejectsClassicalRightRules) {
    // the classical contra-Loeb proof keeps context across boxR; it has no
    // intuitionistic counterpart
    EXPECT_THROW(embed_multisuccedent(fixtures::contra_loeb_certificate()), CutError);
}

TEST(InvertOrLeft, PrincipalTakesBranch) {
    CyclicProof c = small_cut();
    CyclicProof right;
    right.system = SystemId::dIK4;
    put(right, "x:p, x:p \\/ x:q => x:p", Rule::dis_orL, {1, 2});
    put(right, "x:p, x:p => x:p", Rule::id);
    put(right, "x:p, x:q => x:p", Rule::id);
    for (int i : {0, 1}) {
        CyclicProof q = invert_or_left(right, 1, i);
        EXPECT_TRUE(check_local(q).ok);
        Sequent want = parse_sequent(i == 0 ? "x:p, x:p => x:p" : "x:p, x:q => x:p");
        EXPECT_TRUE(same_sequent(q.conclusion(), want)) << render_sequent(q.conclusion());
    }
}

TEST(InvertOrLeft, NeverPrincipal) {
    CyclicProof p;
    p.system = SystemId::dIK4;
    put(p, "x:r, x:p \\/ x:q => x:r", Rule::id);
    CyclicProof q = invert_or_left(p, 1, 1);
    EXPECT_TRUE(same_sequent(q.conclusion(), parse_sequent("x:r, x:q => x:r")));
    EXPECT_TRUE(check_local(q).ok);
    EXPECT_THROW(invert_or_left(p, 0, 0), CutError);
}

TEST(ReduceCut, KeyCaseLowersDegree) {
    CyclicProof c = small_cut();
    CyclicProof r = reduce_cut_step(c, 0);
    EXPECT_TRUE(check_local(r).ok);
    EXPECT_TRUE(same_sequent(r.conclusion(), c.conclusion()));
    EXPECT_LT(degree_of(r), 2);
}

TEST(ReduceCut, NotACut) { EXPECT_THROW(reduce_cut_step(small_cut(), 2), CutError); }

TEST(ReduceCut, CommutesOverLeftRules) {
    // every cut of the embedded Loeb proof can be rewritten once, keeping the
    // conclusion and local correctness
    CyclicProof e = embed_multisuccedent(migl_loeb());
    for (const auto& ci : cuts_of(e)) {
        CyclicProof r = reduce_cut_step(e, ci.node);
        EXPECT_TRUE(same_sequent(r.conclusion(), e.conclusion()));
        LocalReport lr = check_local(r);
        EXPECT_TRUE(lr.ok) << lr.violations[0].message;
    }
}

TEST(Bar, HeightZeroIsRoot) {
    BarredProof b = compute_bar(fixtures::loeb_certificate(SystemId::IK4), 0);
    ASSERT_EQ(b.bar.size(), 1u);
    EXPECT_EQ(b.bar[0], b.tree.root);
}

TEST(Bar, FiniteProofAllLeaves) {
    CyclicProof c = small_cut();
    BarredProof b = compute_bar(c, 5);
    std::size_t leaves = 0;
    for (const auto& n : b.tree.nodes) leaves += n.premisses.empty();
    EXPECT_EQ(b.bar.size(), leaves);
    EXPECT_EQ(b.bar.size(), 3u);
}

TEST(Bar, LoebAntichainOneLoopPosition) {
    BarredProof b = compute_bar(fixtures::loeb_certificate(SystemId::IK4), 3);
    std::vector<int> parent = tree_parents(b.tree);
    int stubs = 0;
    for (int v : b.bar) {
        if (b.tree.nodes[v].backedge) ++stubs;
        for (int u = parent[v]; u >= 0; u = parent[u]) EXPECT_EQ(std::count(b.bar.begin(), b.bar.end(), u), 0);
    }
    EXPECT_EQ(stubs, 1);
}

TEST(Push, NothingToDo) {
    CyclicProof p = fixtures::loeb_certificate(SystemId::IK4);
    p = embed_multisuccedent(p);
    PushResult r = push_cuts_above_bar(compute_bar(p, 2), 2);
    EXPECT_TRUE(r.finished);
    EXPECT_EQ(r.steps, 0u);
    EXPECT_TRUE(r.violation.empty());
}

TEST(Push, SingleKeyCase) {
    BarredProof b = compute_bar(small_cut(), 5);
    PushResult r = push_cuts_above_bar(b, 2);
    EXPECT_TRUE(r.finished);
    EXPECT_GE(r.steps, 1u);
    EXPECT_TRUE(r.violation.empty()) << r.violation;
    EXPECT_LT(degree_of(r.proof), 2);
    EXPECT_TRUE(check_local(r.proof).ok);
}

TEST(DegreeReduce, DegreeOneUnchanged) {
    CyclicProof p = embed_multisuccedent(fixtures::loeb_certificate(SystemId::IK4));
    DegreeReduction r = degree_reduce_bounded(p, 12);
    EXPECT_FALSE(r.unfinished);
    EXPECT_EQ(proof_to_json(r.proof), proof_to_json(p));
}

TEST(DegreeReduce, FiniteCut) {
    DegreeReduction r = degree_reduce_bounded(small_cut(), 12);
    ASSERT_FALSE(r.unfinished) << r.note;
    EXPECT_LE(degree_of(r.proof), 1);
    EXPECT_TRUE(check_local(r.proof).ok);
}

TEST(DegreeReduce, LoebPipeline) {
    CyclicProof e = embed_multisuccedent(migl_loeb());
    DegreeReduction r = degree_reduce_bounded(e, 12);
    ASSERT_FALSE(r.unfinished) << r.note;
    EXPECT_TRUE(r.violation.empty()) << r.violation;
    EXPECT_LE(degree_of(r.proof), 1);
    EXPECT_TRUE(labelled_only(r.proof));
    EXPECT_TRUE(same_sequent(r.proof.conclusion(), e.conclusion()));
    EXPECT_TRUE(check_local(r.proof).ok);
    EXPECT_TRUE(check_progress(r.proof).progressing);

    std::string why;
    auto ik4 = ik4_from_mik4(migl_loeb(), 12, &why);
    ASSERT_TRUE(ik4) << why;
    EXPECT_EQ(ik4->system, SystemId::IK4);
    EXPECT_TRUE(check_local(*ik4).ok);
    EXPECT_TRUE(check_progress(*ik4).progressing);
}

// Random mIK4 theorems go through the whole pipeline.
TEST(DegreeReduce, RandomTheorems) {
    std::mt19937 rng(53);
    int done = 0;
    for (int i = 0; i < 150 && done < 12; ++i) {
        Formula f = fixtures::random_formula(rng, 3, {"p", "q"});
        SearchConfig c;
        c.system = SystemId::mIK4;
        c.max_nodes = 20000;
        SearchOutcome o = prove(f, c);
        if (o.verdict != Verdict::Provable || max_rhs(*o.proof) < 2) continue;
        ++done;
        std::string why;
        auto q = ik4_from_mik4(*o.proof, 12, &why);
        ASSERT_TRUE(q) << render_formula(f) << ": " << why;
        EXPECT_TRUE(check_local(*q).ok) << render_formula(f);
        EXPECT_TRUE(check_progress(*q).progressing) << render_formula(f);
    }
    EXPECT_GT(done, 0);
}

TEST(Refold, LoebUnfolding) {
    CyclicProof p = fixtures::loeb_certificate(SystemId::IK4);
    ThinningResult t = eliminate_thinning(p);
    ASSERT_TRUE(t.ok);
    // cut the back-edge leaf open and fold it again
    CyclicProof open = t.proof;
    for (auto& n : open.nodes) n.backedge.reset();
    auto r = refold(open);
    ASSERT_TRUE(r);
    EXPECT_TRUE(check_local(*r).ok);
    EXPECT_TRUE(check_progress(*r).progressing);
}
