#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igl/sequent.hpp"

namespace igl {

enum class SystemId { K, K4, IK, IK4, mIK4, dIK4 };

std::string system_name(SystemId s);
SystemId parse_system(const std::string& s);
bool has_tr(SystemId s);
bool single_succedent(SystemId s);

enum class Rule {
    id, botL, cut, wL, wR, cL, cR, th,
    impL, impR, andL, andR, orL, orR, boxL, boxR, diaL, diaR,
    tr, macro_impL, macro_diaR, dis_orL, dis_orR
};

std::string rule_name(Rule r);
std::optional<Rule> parse_rule(const std::string& s);

enum class Side { L, R };
struct Position {
    Side side;
    int index;
    bool operator==(const Position&) const = default;
};

struct RuleInstance {
    Rule rule;
    Sequent conclusion;
    std::vector<Sequent> premisses;
    std::vector<Position> principal;
    std::optional<Label> fresh;
    std::optional<Label> target;            // boxL / diaR successor label
    std::optional<DisjFormula> cut_formula;
};

struct StepCheck {
    bool ok = false;
    bool generalized = false;  // accepted only with built-in weakening/contraction
    std::string message;
};

// Sequent-level invariants of a system (RHS size, degrees).
std::optional<std::string> system_violation(const Sequent& s, SystemId sys);

// Checks one inference step. Strict Fig. 1 shapes are tried first; the
// generalized shape allows premisses that drop context formulas or retain
// principal ones, i.e. the rule with weakening and contraction folded in.
StepCheck check_step(Rule rule, const Sequent& conclusion, const std::vector<Sequent>& premisses,
                     const std::vector<Position>& principal, const std::optional<Label>& fresh,
                     const std::optional<DisjFormula>& cut_formula, SystemId sys);
inline StepCheck check_step(const RuleInstance& r, SystemId sys) {
    return check_step(r.rule, r.conclusion, r.premisses, r.principal, r.fresh, r.cut_formula, sys);
}

struct RuleConfig {
    std::vector<DisjFormula> cut_candidates;  // cut is only enumerated from these
    bool structural = true;                   // include wL, wR, cL, cR, th
};

std::vector<RuleInstance> applicable_rules(const Sequent& s, SystemId sys,
                                           const RuleConfig& cfg = {});
std::vector<Sequent> apply_rule(const RuleInstance& r);

struct Saturation {
    bool saturated = true;
    bool rel_closed = true;
    std::vector<Position> unsaturated;
};

// `classical` adds the K/K4 clauses for implication and box on the right;
// `transitive` = false drops the closure requirement on rel (system K).
Saturation is_saturated(const Sequent& s, bool classical = false, bool transitive = true);

// Contraction-retaining invertible instances, one per unsaturated principal
// formula, in position order.
std::vector<RuleInstance> macro_rules(const Sequent& s, bool classical = false);

bool is_quasi_tree_like(const Sequent& s);
// The supporting tree of a quasi-tree relational context, as parent map.
std::optional<std::map<Label, Label>> quasi_tree_parents(const Sequent& s);

// Generalized identity and bottom: x:p on both sides, or x:false on the left.
std::optional<RuleInstance> closing_rule(const Sequent& s);

}  // namespace igl
