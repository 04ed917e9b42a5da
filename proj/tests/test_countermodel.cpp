#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "igl/countermodel.hpp"

using namespace igl;

namespace {

Countermodel refute(Formula f) {
    SearchConfig c;
    c.system = SystemId::mIK4;
    SearchOutcome o = prove(f, c);
    if (o.verdict != Verdict::Refutable) throw std::runtime_error("not refuted: " + render_formula(f));
    return extract_countermodel(*o.denier);
}

DenierTree denier_for(Formula f) {
    SearchConfig c;
    c.system = SystemId::mIK4;
    return *prove(f, c).denier;
}

}  // namespace

TEST(Extract, AtomOneWorld) {
    Countermodel cm = refute(atom("p"));
    const KripkeStructure& k = cm.structure;
    ASSERT_EQ(k.size(), 1);
    EXPECT_EQ(k.domain[0], std::vector<Element>{"x"});
    EXPECT_TRUE(!k.pred[0].count("p") || k.pred[0].at("p").empty());
    EXPECT_TRUE(verify_countermodel(k, cm.root, cm.env, atom("p")).ok);
}

TEST(Extract, ContraLoeb) {
    Formula f = parse_formula(fixtures::kContraLoeb);
    DenierTree d = denier_for(f);
    Countermodel cm = extract_countermodel(d);
    CountermodelCheck v = verify_countermodel(cm.structure, cm.root, cm.env, f);
    EXPECT_TRUE(v.ok) << v.message;
    EXPECT_TRUE(check_igl_pred_class(cm.structure).ok);
    EXPECT_TRUE(verify_segments(cm, d).ok) << verify_segments(cm, d).message;

    PredBirel b = pred_to_birel(cm.structure);
    EXPECT_FALSE(check_birel_model(b.model));
    EXPECT_TRUE(check_igl_birel_class(b.model).ok);
    int root = b.index(cm.root, cm.env.at(kRootLabel));
    ASSERT_GE(root, 0);
    EXPECT_FALSE(birel_satisfies(b.model, root, f));
    // at least the two R-chains of the hand-made model
    EXPECT_GE(b.model.size(), 4);
}

TEST(Extract, PerWorldRelationTransitive) {
    std::mt19937 rng(41);
    int seen = 0;
    for (int i = 0; i < 80; ++i) {
        Formula f = fixtures::random_formula(rng, 3, {"p", "q"});
        SearchConfig c;
        c.system = SystemId::mIK4;
        c.max_nodes = 20000;
        SearchOutcome o = prove(f, c);
        if (o.verdict != Verdict::Refutable) continue;
        ++seen;
        Countermodel cm = extract_countermodel(*o.denier);
        for (const auto& r : cm.structure.rel)
            for (const auto& [a, b] : r)
                for (const auto& [b2, c2] : r)
                    if (b == b2) EXPECT_TRUE(r.count({a, c2})) << render_formula(f);
        EXPECT_TRUE(verify_countermodel(cm.structure, cm.root, cm.env, f).ok) << render_formula(f);
        EXPECT_TRUE(verify_segments(cm, *o.denier).ok) << render_formula(f);
    }
    EXPECT_GT(seen, 10);
}

TEST(Verify, CorruptedValuationFails) {
    Formula f = parse_formula(fixtures::kContraLoeb);
    DenierTree d = denier_for(f);
    Countermodel cm = extract_countermodel(d);
    for (auto& pr : cm.structure.pred) pr["p"].clear();
    CountermodelCheck v = verify_segments(cm, d);
    EXPECT_FALSE(v.ok);
    EXPECT_NE(v.message.find(" at w"), std::string::npos) << v.message;
}

TEST(Verify, InjectedCycleFailsClassCheck) {
    Formula f = parse_formula(fixtures::kContraLoeb);
    Countermodel cm = refute(f);
    KripkeStructure& k = cm.structure;
    for (int w = 0; w < k.size(); ++w)
        for (const auto& d : k.domain[w]) {
            // a reflexive point, propagated upwards to keep the structure valid
            for (int v = 0; v < k.size(); ++v)
                if (k.leq[w][v]) k.rel[v].insert({d, d});
            CountermodelCheck c = verify_countermodel(k, cm.root, cm.env, f);
            EXPECT_FALSE(c.ok);
            EXPECT_NE(c.message.find("IGL^pred"), std::string::npos) << c.message;
            return;
        }
}

TEST(Verify, GoalThatHoldsIsReported) {
    Countermodel cm = refute(atom("p"));
    EXPECT_FALSE(verify_countermodel(cm.structure, cm.root, cm.env, imp(atom("p"), atom("p"))).ok);
}

TEST(Extract, RejectsInvalidTree) {
    DenierTree d = denier_for(atom("p"));
    d.nodes[d.root].sequent.lhs.push_back(DisjFormula("x", atom("p")));
    EXPECT_THROW(extract_countermodel(d), std::invalid_argument);
}

TEST(Json, ExportHasStructureAndProvenance) {
    Countermodel cm = refute(parse_formula(fixtures::kContraLoeb));
    std::string j = countermodel_to_json(cm);
    EXPECT_NE(j.find("\"structure\""), std::string::npos);
    EXPECT_NE(j.find("\"provenance\""), std::string::npos);
}
