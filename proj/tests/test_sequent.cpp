#include <gtest/gtest.h>

#include <algorithm>

#include "igl/rules.hpp"

using namespace igl;

namespace {

Sequent S(const char* t) { return parse_sequent(t); }

bool has_instance(const std::vector<RuleInstance>& v, Rule r, const std::vector<Sequent>& prem) {
    return std::any_of(v.begin(), v.end(), [&](const RuleInstance& ri) {
        if (ri.rule != r || ri.premisses.size() != prem.size()) return false;
        for (std::size_t i = 0; i < prem.size(); ++i)
            if (!same_sequent(ri.premisses[i], prem[i])) return false;
        return true;
    });
}

}  // namespace

TEST(SequentSyntax, RoundTrip) {
    for (const char* t : {"xRy, yRz | x:p, y:[]q => z:r", "=> x:[]p", "x:p => x:p \\/ y:q", "xRy | =>"}) {
        Sequent s = S(t);
        EXPECT_TRUE(same_sequent(parse_sequent(render_sequent(s)), s)) << t;
    }
}

TEST(SequentSyntax, Degree) {
    EXPECT_EQ(max_degree(S("x:p => x:p \\/ y:q \\/ z:r")), 3);
    EXPECT_EQ(max_degree(S("x:p => x:q")), 1);
}

TEST(Labels, LengthFirstOrder) {
    EXPECT_TRUE(LabelLess{}("y2", "y10"));
    EXPECT_FALSE(LabelLess{}("y10", "y2"));
    Sequent s = S("xRy0, y0Ry1 | => y1:p");
    EXPECT_EQ(fresh_label(s), "y2");
    EXPECT_EQ(labels(s), (LabelSet{"x", "y0", "y1"}));
}

TEST(Labels, Rename) {
    Sequent s = rename(S("xRy | y:p => x:<>p"), {{"y", "z"}});
    EXPECT_TRUE(same_sequent(s, S("xRz | z:p => x:<>p")));
}

TEST(Multiset, EqualityAndRemoval) {
    Sequent s = S("x:p, x:p, y:q =>");
    EXPECT_TRUE(multiset_equal(s.lhs, S("y:q, x:p, x:p =>").lhs));
    EXPECT_FALSE(multiset_equal(s.lhs, S("y:q, x:p =>").lhs));
    EXPECT_TRUE(remove_one(s.lhs, DisjFormula("x", atom("p"))));
    EXPECT_TRUE(multiset_equal(s.lhs, S("x:p, y:q =>").lhs));
    EXPECT_FALSE(remove_one(s.lhs, DisjFormula("z", atom("p"))));
}

TEST(SystemInvariants, SingleSuccedent) {
    EXPECT_FALSE(system_violation(S("x:p => x:p"), SystemId::IK4));
    EXPECT_TRUE(system_violation(S("x:p => x:p, x:q"), SystemId::IK4));
    EXPECT_FALSE(system_violation(S("x:p => x:p, x:q"), SystemId::mIK4));
    EXPECT_TRUE(system_violation(S("x:p => x:p \\/ x:q"), SystemId::mIK4));
    EXPECT_FALSE(system_violation(S("x:p => x:p \\/ x:q"), SystemId::dIK4));
}

TEST(ApplicableRules, Identity) {
    auto v = applicable_rules(S("x:p => x:p"), SystemId::K);
    EXPECT_TRUE(has_instance(v, Rule::id, {}));
}

TEST(ApplicableRules, Transitivity) {
    auto v = applicable_rules(S("xRy, yRz | => z:p"), SystemId::K4);
    EXPECT_TRUE(has_instance(v, Rule::tr, {S("xRy, yRz, xRz | => z:p")}));
    auto k = applicable_rules(S("xRy, yRz | => z:p"), SystemId::K);
    EXPECT_FALSE(has_instance(k, Rule::tr, {S("xRy, yRz, xRz | => z:p")}));
}

TEST(ApplicableRules, BoxRightFresh) {
    auto v = applicable_rules(S("=> x:[]p"), SystemId::IK4);
    EXPECT_TRUE(has_instance(v, Rule::boxR, {S("xRy0 | => y0:p")}));
}

namespace {
std::vector<Sequent> premisses_of(const Sequent& s, Rule r, SystemId sys) {
    for (const auto& ri : applicable_rules(s, sys, {{}, false}))
        if (ri.rule == r) return apply_rule(ri);
    ADD_FAILURE() << rule_name(r) << " not applicable";
    return {};
}
}  // namespace

TEST(ApplyRule, ImpR) {
    auto prem = premisses_of(S("=> x:p -> q"), Rule::impR, SystemId::IK4);
    ASSERT_EQ(prem.size(), 1u);
    EXPECT_TRUE(same_sequent(prem[0], S("x:p => x:q")));
}

TEST(ApplyRule, DiaLeftFresh) {
    auto prem = premisses_of(S("x:<>p => x:q"), Rule::diaL, SystemId::IK4);
    ASSERT_EQ(prem.size(), 1u);
    EXPECT_TRUE(same_sequent(prem[0], S("xRy0 | y0:p => x:q")));
}

TEST(ApplyRule, IdHasNoPremisses) {
    RuleInstance r{Rule::id, S("x:p => x:p"), {}, {}, {}, {}, {}};
    EXPECT_TRUE(apply_rule(r).empty());
}

TEST(CheckStep, BoxRNeedsFreshLabel) {
    StepCheck ok = check_step(Rule::boxR, S("=> x:[]p"), {S("xRy | => y:p")}, {{Side::R, 0}}, Label("y"), {}, SystemId::IK4);
    EXPECT_TRUE(ok.ok) << ok.message;
    StepCheck bad = check_step(Rule::boxR, S("y:q => x:[]p"), {S("xRy | y:q => y:p")}, {{Side::R, 0}}, Label("y"), {},
                               SystemId::IK4);
    EXPECT_FALSE(bad.ok);
}

TEST(CheckStep, TrNotInK) {
    EXPECT_FALSE(check_step(Rule::tr, S("xRy, yRz | => z:p"), {S("xRy, yRz, xRz | => z:p")}, {}, {}, {},
                            SystemId::K)
                     .ok);
    EXPECT_TRUE(check_step(Rule::tr, S("xRy, yRz | => z:p"), {S("xRy, yRz, xRz | => z:p")}, {}, {}, {},
                           SystemId::K4)
                    .ok);
}

TEST(CheckStep, ThinningDropsAtoms) {
    EXPECT_TRUE(check_step(Rule::th, S("xRy, xRz | => z:p"), {S("xRz | => z:p")}, {}, {}, {}, SystemId::IK4).ok);
    EXPECT_FALSE(check_step(Rule::th, S("xRz | => z:p"), {S("xRy, xRz | => z:p")}, {}, {}, {}, SystemId::IK4).ok);
}

TEST(CheckStep, DisjunctiveRulesOnlyInDIK4) {
    Sequent c = S("x:p => x:p \\/ x:q");
    Sequent prem = S("x:p => x:p");
    std::vector<Position> at{{Side::R, 0}};
    EXPECT_FALSE(check_step(Rule::dis_orR, c, {prem}, at, {}, {}, SystemId::mIK4).ok);
    EXPECT_TRUE(check_step(Rule::dis_orR, c, {prem}, at, {}, {}, SystemId::dIK4).ok);
}

TEST(MacroRules, DiaRightRetains) {
    auto v = macro_rules(S("xRy | => x:<>p"));
    EXPECT_TRUE(has_instance(v, Rule::macro_diaR, {S("xRy | => x:<>p, y:p")}));
}

TEST(MacroRules, ImpLeftRetains) {
    auto v = macro_rules(S("x:p -> q => x:r"));
    EXPECT_TRUE(has_instance(v, Rule::macro_impL, {S("x:p -> q => x:r, x:p"), S("x:p -> q, x:q => x:r")}));
}

TEST(MacroRules, NoneWhenSaturated) {
    Sequent s = S("x:p => x:q");
    ASSERT_TRUE(is_saturated(s).saturated);
    EXPECT_TRUE(macro_rules(s).empty());
}

TEST(Saturation, Examples) {
    EXPECT_TRUE(is_saturated(S("x:p => x:q")).saturated);
    Saturation a = is_saturated(S("x:p & q =>"));
    EXPECT_FALSE(a.saturated);
    ASSERT_EQ(a.unsaturated.size(), 1u);
    EXPECT_EQ(a.unsaturated[0], (Position{Side::L, 0}));
    Saturation t = is_saturated(S("xRy, yRz | =>"));
    EXPECT_FALSE(t.saturated);
    EXPECT_FALSE(t.rel_closed);
}

TEST(QuasiTree, Examples) {
    EXPECT_TRUE(is_quasi_tree_like(S("x:p => x:q")));
    EXPECT_TRUE(is_quasi_tree_like(S("xRy, xRz | => x:p")));
    EXPECT_FALSE(is_quasi_tree_like(S("xRy, yRx | => x:p")));
    auto par = quasi_tree_parents(S("xRy, xRz | => x:p"));
    ASSERT_TRUE(par);
    EXPECT_EQ(par->at("y"), "x");
    EXPECT_EQ(par->at("z"), "x");
}

TEST(ClosingRule, IdAndBot) {
    EXPECT_TRUE(closing_rule(S("x:p, y:q => x:p, z:r")));
    EXPECT_TRUE(closing_rule(S("x:false => y:p")));
    EXPECT_FALSE(closing_rule(S("x:p => y:p")));
}

TEST(TransitiveClosure, Chain) {
    RelCtx r = transitive_closure(S("xRy, yRz, zRw | =>").rel);
    EXPECT_EQ(r.size(), 6u);
    EXPECT_TRUE(r.count({"x", "w"}));
}
