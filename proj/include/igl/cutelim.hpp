#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igl/proof.hpp"

namespace igl {

struct CutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CutInfo {
    int node;
    DisjFormula formula;
    int degree;
};

std::vector<CutInfo> cuts_of(const CyclicProof& p);
// Maximum cut degree over the graph, 0 when cut-free.
int degree_of(const CyclicProof& p);

// mIK4 (or K4) cut-free proof to dIK4: every RHS becomes one disjunction
// without repetitions, right rules are simulated by cutting against the
// derived implication. Throws CutError on input with cuts.
CyclicProof embed_multisuccedent(const CyclicProof& p);

// From a proof of  R, Gamma, phi0 \/ phi1 => psi  (the disjunction at lhs
// index `index` of the root) to one of  R, Gamma, phi_i => psi.
CyclicProof invert_or_left(const CyclicProof& p, int index, int i);

// One rewrite at the cut node `cut`: the key case when the cut formula is
// principal by dis_orR on the left, otherwise a commutation of the cut over
// the last step of the left subproof. The result is a tree (back-edges below
// the rewritten region are unfolded as needed). Throws CutError when no case
// applies.
CyclicProof reduce_cut_step(const CyclicProof& p, int cut);

// Node ids of a proof tree.
using Bar = std::vector<int>;

// Unfolds p to the given height and returns the unfolding together with the
// antichain of positions at that height (or leaves above it).
struct BarredProof {
    CyclicProof tree;  // back-edges only above the bar
    Bar bar;
};
BarredProof compute_bar(const CyclicProof& p, int height);

struct PushResult {
    CyclicProof proof;
    Bar bar;
    bool finished = true;  // false when the step cap was hit
    std::size_t steps = 0;
    std::string violation;  // first failed trace-preservation check, if any
};

// Reduces degree-d cuts beneath the bar until none is left there. A cut whose
// left premiss is a bar leaf stays and joins the bar.
PushResult push_cuts_above_bar(const BarredProof& b, int d, std::size_t max_steps = 20000);

struct DegreeReduction {
    CyclicProof proof;
    bool unfinished = false;
    int degree = 0;
    int height = 0;  // bar height at which the reduct folded
    std::size_t steps = 0;
    std::string violation;  // first failed trace-preservation check, if any
    std::string note;
};

// Lowers the degree by pushing cuts above bars of growing height and trying
// to fold the result back into a cyclic proof after each height.
DegreeReduction degree_reduce_bounded(const CyclicProof& p, int max_height);

// For formulas proved in mIK4 but not found by direct IK4 search: embed,
// reduce until degree 1, and convert the result to an IK4 proof.
std::optional<CyclicProof> ik4_from_mik4(const CyclicProof& p, int max_height, std::string* why = nullptr);

// Folds a finite tree with open leaves back into a cyclic proof: each open
// leaf gets a back-edge to an ancestor equal up to renaming when the cycle
// progresses. Returns nullopt when some leaf stays open.
std::optional<CyclicProof> refold(const CyclicProof& tree);

}  // namespace igl
