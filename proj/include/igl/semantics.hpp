#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "igl/rules.hpp"

namespace igl {

// Worlds are 0..n-1; `names` are only for I/O.
struct BirelModel {
    std::vector<std::string> names;
    std::vector<std::vector<char>> leq;  // leq[w][v]: w <= v
    std::vector<std::vector<char>> acc;  // acc[w][v]: w R v
    std::vector<std::set<std::string>> val;

    int size() const { return static_cast<int>(names.size()); }
    int world(const std::string& name) const;  // throws on unknown name
    static BirelModel empty(int n);
};

// Partial order, F1, F2 and monotone valuation. Returns the first failure.
std::optional<std::string> check_birel_model(const BirelModel& m);

struct ClassReport {
    bool ok = true;
    std::string message;
    std::vector<int> cycle;  // alternating <= / R steps, first == last
};

// acc transitive and (leq;acc) terminating.
ClassReport check_igl_birel_class(const BirelModel& m);

// `classical` reads -> and [] locally (the leq = identity reading).
bool birel_satisfies(const BirelModel& m, int w, Formula f, bool classical = false);
// Truth set of f over all worlds.
std::vector<char> birel_truth(const BirelModel& m, Formula f, bool classical = false);

// Reflexive-transitive closure of leq in place.
void close_leq(BirelModel& m);
void close_acc(BirelModel& m);

using Element = std::string;

struct KripkeStructure {
    std::vector<std::string> names;
    std::vector<std::vector<char>> leq;
    std::vector<std::vector<Element>> domain;
    std::vector<std::map<std::string, std::set<Element>>> pred;
    std::vector<std::set<std::pair<Element, Element>>> rel;

    int size() const { return static_cast<int>(names.size()); }
    int world(const std::string& name) const;
    bool in_domain(int w, const Element& d) const;
};

using Environment = std::map<Label, Element>;

std::optional<std::string> check_kripke_structure(const KripkeStructure& k);
ClassReport check_igl_pred_class(const KripkeStructure& k);

// K, w |=^env ST_x(f). Throws std::invalid_argument if env misses x.
bool kripke_satisfies(const KripkeStructure& k, int w, const Environment& env, const Label& x,
                      Formula f);

struct PredBirel {
    BirelModel model;
    std::vector<std::pair<int, Element>> origin;  // model world -> (w, d)
    int index(int w, const Element& d) const;     // -1 if absent
};

PredBirel pred_to_birel(const KripkeStructure& k);

// ---- sequents over birelational models

using Interpretation = std::map<Label, int>;

bool is_interpretation(const BirelModel& m, const Sequent& s, const Interpretation& i);
// All of lhs true implies some rhs disjunct true.
bool seq_satisfied(const BirelModel& m, const Interpretation& i, const Sequent& s);

std::optional<Interpretation> lift_interpretation(const BirelModel& m, const Sequent& s,
                                                  const Interpretation& i, const Label& x, int w);

struct SoundnessWitness {
    int premiss = -1;
    Interpretation interp;
    bool by_search = false;  // the rule-specific construction did not apply
};

// A premiss of r failed by some I' >= i. nullopt means none exists (which
// Prop. local soundness rules out on IGL models).
std::optional<SoundnessWitness> local_soundness_witness(const BirelModel& m, const RuleInstance& r,
                                                        const Interpretation& i);

// All interpretations of s into m, in lexicographic order.
void for_each_interpretation(const BirelModel& m, const Sequent& s,
                             const std::function<bool(const Interpretation&)>& f);

// ---- enumeration

// Every IGL^birel model with 1..max_worlds worlds over `atoms`, one per
// isomorphism class. The callback may return false to stop.
void enumerate_igl_models(int max_worlds, const std::vector<std::string>& atoms,
                          const std::function<bool(const BirelModel&)>& f);
std::vector<BirelModel> enumerate_igl_models(int max_worlds, const std::vector<std::string>& atoms);
// Canonical form under world permutations (names ignored).
std::string canonical_form(const BirelModel& m);

// ---- I/O

std::string model_to_json(const BirelModel& m, bool pretty = false);
// leq is closed reflexively and transitively on input; acc is taken as given.
BirelModel model_from_json(const std::string& text);
std::string model_to_dot(const BirelModel& m);
std::string kripke_to_json(const KripkeStructure& k, bool pretty = false);
KripkeStructure kripke_from_json(const std::string& text);

}  // namespace igl
