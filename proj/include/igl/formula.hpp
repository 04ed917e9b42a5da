#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace igl {

enum class Op : unsigned char { Atom, Bot, And, Or, Imp, Box, Dia };

struct Node;
// Formulas are hash-consed: two formulas are structurally equal iff the
// pointers are equal. Nodes live for the whole process.
using Formula = const Node*;

struct Node {
    Op op;
    std::string name;  // atoms only
    Formula a = nullptr;
    Formula b = nullptr;
    std::size_t size = 1;
    int modal_depth = 0;
};

Formula atom(const std::string& name);
Formula bot();
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula imp(Formula a, Formula b);
Formula box(Formula a);
Formula dia(Formula a);
inline Formula neg(Formula a) { return imp(a, bot()); }

// Structural order: operator first, then atom name, then children.
int compare(Formula x, Formula y);
struct FormulaLess {
    bool operator()(Formula x, Formula y) const { return compare(x, y) < 0; }
};
using FormulaSet = std::set<Formula, FormulaLess>;

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
    std::size_t offset;
    std::vector<std::string> expected;
};

Formula parse_formula(std::string_view text);
std::string render_formula(Formula f);

FormulaSet subformula_closure(Formula f);
std::set<std::string> atoms_of(Formula f);

// ---- first-order side of the standard translation

enum class FoOp : unsigned char { Pred, Rel, Bot, And, Or, Imp, Forall, Exists };

struct FoFormula;
using Fo = std::shared_ptr<const FoFormula>;

struct FoFormula {
    FoOp op;
    std::string pred;   // Pred
    std::string x, y;   // Pred uses x; Rel uses x,y; quantifiers bind x
    Fo a, b;
};

Fo standard_translation(const std::string& x, Formula f);
std::string render_fo(const Fo& f);
std::set<std::string> free_vars(const Fo& f);

}  // namespace igl
