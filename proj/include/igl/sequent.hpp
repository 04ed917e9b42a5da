#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "igl/formula.hpp"

namespace igl {

using Label = std::string;
// Labels order by length first, so y2 < y10 and creation order is kept.
struct LabelLess {
    bool operator()(const Label& a, const Label& b) const {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    }
};
using LabelSet = std::set<Label, LabelLess>;
using Renaming = std::map<Label, Label>;

struct LabelledFormula {
    Label label;
    Formula formula;
    bool operator==(const LabelledFormula& o) const {
        return formula == o.formula && label == o.label;
    }
    bool operator<(const LabelledFormula& o) const {
        if (label != o.label) return LabelLess{}(label, o.label);
        return compare(formula, o.formula) < 0;
    }
};

// A disjunction of labelled formulas, flattened. Degree 1 is a plain
// labelled formula.
struct DisjFormula {
    std::vector<LabelledFormula> ds;

    DisjFormula() = default;
    DisjFormula(LabelledFormula f) : ds{std::move(f)} {}
    DisjFormula(Label l, Formula f) : ds{LabelledFormula{std::move(l), f}} {}
    explicit DisjFormula(std::vector<LabelledFormula> v) : ds(std::move(v)) {}

    std::size_t degree() const { return ds.size(); }
    bool labelled() const { return ds.size() == 1; }
    const LabelledFormula& lf() const { return ds.front(); }
    const Label& label() const { return ds.front().label; }
    Formula formula() const { return ds.front().formula; }

    bool operator==(const DisjFormula& o) const { return ds == o.ds; }
    bool operator<(const DisjFormula& o) const { return ds < o.ds; }
};

using RelAtom = std::pair<Label, Label>;
using RelCtx = std::set<RelAtom>;

struct Sequent {
    RelCtx rel;
    std::vector<DisjFormula> lhs;
    std::vector<DisjFormula> rhs;
};

// Multiset equality on both sides, set equality on rel.
bool same_sequent(const Sequent& a, const Sequent& b);
// Order-insensitive total order, used for memo tables.
bool sequent_less(const Sequent& a, const Sequent& b);
void normalize(Sequent& s);

bool contains(const std::vector<DisjFormula>& side, const DisjFormula& f);
inline bool contains(const std::vector<DisjFormula>& side, const Label& x, Formula f) {
    return contains(side, DisjFormula(x, f));
}
// Every element of `small` occurs in `big` (set inclusion).
bool subset_of(const std::vector<DisjFormula>& small, const std::vector<DisjFormula>& big);
// Remove a single occurrence; returns false if absent.
bool remove_one(std::vector<DisjFormula>& side, const DisjFormula& f);
bool multiset_equal(std::vector<DisjFormula> a, std::vector<DisjFormula> b);

LabelSet labels(const Sequent& s);
LabelSet labels(const RelCtx& r);
int max_degree(const Sequent& s);
// First y<k> (k = 0,1,...) not occurring in s nor in `avoid`.
Label fresh_label(const Sequent& s, const LabelSet& avoid = {});

LabelledFormula rename(const LabelledFormula& f, const Renaming& m);
DisjFormula rename(const DisjFormula& f, const Renaming& m);
Sequent rename(const Sequent& s, const Renaming& m);

RelCtx transitive_closure(const RelCtx& r);

std::string render(const LabelledFormula& f);
std::string render(const DisjFormula& f);
std::string render_sequent(const Sequent& s);
// "xRy, yRz | x:p, y:[]q => z:r"; disjunctions of labelled formulas use "\/".
Sequent parse_sequent(std::string_view text);
DisjFormula parse_disj(std::string_view text);

}  // namespace igl
