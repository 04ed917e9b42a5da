#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "igl/formula.hpp"

using namespace igl;

TEST(Parse, LoebShape) {
    Formula p = atom("p");
    EXPECT_EQ(parse_formula("[]([]p -> p) -> []p"), imp(box(imp(box(p), p)), box(p)));
}

TEST(Parse, FalseIsBottom) { EXPECT_EQ(parse_formula("false"), bot()); }

TEST(Parse, ContraLoebShape) {
    Formula p = atom("p");
    EXPECT_EQ(parse_formula("<>p -> <>(p & []~p)"), imp(dia(p), dia(conj(p, box(imp(p, bot()))))));
}

TEST(Parse, NegationIsImplicationToBottom) {
    EXPECT_EQ(parse_formula("~q"), imp(atom("q"), bot()));
}

TEST(Parse, ErrorReportsOffsetAndExpected) {
    try {
        parse_formula("p -> ");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset, 5u);
        EXPECT_FALSE(e.expected.empty());
    }
    EXPECT_THROW(parse_formula("p & & q"), ParseError);
    EXPECT_THROW(parse_formula("(p"), ParseError);
}

TEST(Render, Basics) {
    Formula p = atom("p"), q = atom("q"), r = atom("r");
    EXPECT_EQ(render_formula(box(p)), "[]p");
    EXPECT_EQ(render_formula(imp(p, imp(q, r))), "p -> q -> r");
    EXPECT_EQ(render_formula(conj(disj(p, q), r)), "(p | q) & r");
    EXPECT_EQ(render_formula(imp(imp(p, q), r)), "(p -> q) -> r");
}

TEST(Render, RoundTripRandom) {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        Formula f = fixtures::random_formula(rng, 5, {"p", "q", "r"});
        EXPECT_EQ(parse_formula(render_formula(f)), f) << render_formula(f);
    }
}

TEST(HashCons, StructuralEqualityIsPointerEquality) {
    EXPECT_EQ(conj(atom("p"), atom("q")), conj(atom("p"), atom("q")));
    EXPECT_NE(conj(atom("p"), atom("q")), conj(atom("q"), atom("p")));
    EXPECT_EQ(compare(atom("p"), atom("p")), 0);
    EXPECT_NE(compare(atom("p"), atom("q")), 0);
}

TEST(StandardTranslation, Atom) {
    EXPECT_EQ(render_fo(standard_translation("x", atom("p"))), "p(x)");
}

TEST(StandardTranslation, Box) {
    Fo t = standard_translation("x", box(atom("p")));
    ASSERT_EQ(t->op, FoOp::Forall);
    ASSERT_EQ(t->a->op, FoOp::Imp);
    EXPECT_EQ(t->a->a->op, FoOp::Rel);
    EXPECT_EQ(t->a->a->x, "x");
    EXPECT_EQ(t->a->a->y, t->x);
    EXPECT_EQ(t->a->b->op, FoOp::Pred);
    EXPECT_EQ(t->a->b->x, t->x);
    EXPECT_EQ(free_vars(t), std::set<std::string>{"x"});
}

TEST(StandardTranslation, Bottom) {
    EXPECT_EQ(standard_translation("x", bot())->op, FoOp::Bot);
}

TEST(StandardTranslation, OnlyTheGivenVariableIsFree) {
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        Formula f = fixtures::random_formula(rng, 4, {"p", "q"});
        auto fv = free_vars(standard_translation("x", f));
        EXPECT_TRUE(fv.empty() || fv == std::set<std::string>{"x"}) << render_formula(f);
    }
}

TEST(Subformulas, Examples) {
    Formula p = atom("p");
    EXPECT_EQ(subformula_closure(p), FormulaSet{p});
    EXPECT_EQ(subformula_closure(box(p)), (FormulaSet{box(p), p}));
    EXPECT_EQ(subformula_closure(imp(box(p), p)), (FormulaSet{imp(box(p), p), box(p), p}));
}

// Independent count: distinct nodes reached by walking the tree.
static void walk(Formula f, std::set<Formula>& seen) {
    if (!f || !seen.insert(f).second) return;
    walk(f->a, seen);
    walk(f->b, seen);
}

TEST(Subformulas, MatchesTreeWalk) {
    std::mt19937 rng(3);
    for (int i = 0; i < 300; ++i) {
        Formula f = fixtures::random_formula(rng, 5, {"p", "q"});
        std::set<Formula> seen;
        walk(f, seen);
        EXPECT_EQ(subformula_closure(f).size(), seen.size());
    }
}

TEST(Atoms, Collected) {
    EXPECT_EQ(atoms_of(parse_formula("[]p -> <>(q & ~p)")), (std::set<std::string>{"p", "q"}));
    EXPECT_TRUE(atoms_of(parse_formula("false -> false")).empty());
}
