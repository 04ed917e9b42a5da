#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igl/rules.hpp"

namespace igl {

// A leaf that stands for the subproof at `target`; `renaming` sends labels
// of the target sequent to labels of this node.
struct BackEdge {
    int target = -1;
    Renaming renaming;
};

struct ProofNode {
    Sequent sequent;
    std::optional<Rule> rule;
    std::vector<int> premisses;
    std::vector<Position> principal;
    std::optional<Label> fresh;
    std::optional<DisjFormula> cut_formula;
    std::optional<BackEdge> backedge;
};

struct CyclicProof {
    SystemId system = SystemId::IK4;
    int root = 0;
    std::vector<ProofNode> nodes;  // node id = index

    int add(Sequent s) {
        nodes.push_back({std::move(s), {}, {}, {}, {}, {}, {}});
        return static_cast<int>(nodes.size()) - 1;
    }
    const Sequent& conclusion() const { return nodes.at(root).sequent; }
};

struct Violation {
    int node;
    std::string message;
};

struct LocalReport {
    bool ok = true;
    std::vector<Violation> violations;
    std::vector<int> generalized;       // steps accepted with built-in weakening/contraction
    std::vector<int> relaxed_backedges; // back-edges that also thin the relational context
};

struct LocalOptions {
    bool strict_backedges = false;  // demand rel equality at back-edges
};

LocalReport check_local(const CyclicProof& p, const LocalOptions& opt = {});
// Stores the inferred principal position of steps that leave it implicit.
void fill_principals(CyclicProof& p);

// Ancestor relation of the underlying tree (back-edges excluded).
std::vector<int> tree_parents(const CyclicProof& p);

// Resolves a back-edge renaming to a total injective map on the target's
// labels, extending by identity where that stays injective.
std::optional<Renaming> complete_renaming(const Sequent& target, const Sequent& here,
                                          const Renaming& partial);

struct TraceEdge {
    Label x, y;
    bool progress;
    bool operator<(const TraceEdge& o) const {
        if (x != o.x) return x < o.x;
        if (y != o.y) return y < o.y;
        return progress < o.progress;
    }
    bool operator==(const TraceEdge&) const = default;
};

struct TraceRelation {
    int source = -1;
    int target = -1;
    std::vector<TraceEdge> edges;  // sorted, one entry per (x, y) with the strongest flag
};

// Trace relation from `parent` to its premiss `child`, or along the back-edge
// of `parent` when `child` is its target.
TraceRelation edge_trace_relation(const CyclicProof& p, int parent, int child);
TraceRelation compose(const TraceRelation& a, const TraceRelation& b);

struct ProgressReport {
    bool progressing = true;
    std::vector<int> witness;  // a cycle of node ids, first == last
    std::size_t relations = 0; // size of the composition closure
};

ProgressReport check_progress(const CyclicProof& p);
// The dual condition: no idempotent cycle relation has a progressing
// self-pair (so no infinite path carries a progressing trace).
bool no_progressing_cycle(const CyclicProof& p, std::vector<int>* witness = nullptr);
// For the relation of a single cycle: every (resp. no) idempotent power has a
// progressing self-pair.
bool cycle_progresses(const TraceRelation& r);
bool cycle_never_progresses(const TraceRelation& r);

struct ThinningResult {
    CyclicProof proof;
    bool ok = true;
    std::string error;
    std::size_t removed = 0;
};

ThinningResult eliminate_thinning(const CyclicProof& p);

struct UnfoldNode {
    int origin;   // node id in the proof graph
    int parent;   // -1 for the root
    int depth;
    bool via_backedge;
    Sequent sequent;
    Renaming renaming;  // origin labels -> labels used here
    std::vector<int> children;
};

std::vector<UnfoldNode> unfold(const CyclicProof& p, int depth);

std::string proof_to_json(const CyclicProof& p, bool pretty = false);
CyclicProof proof_from_json(const std::string& text);
std::string proof_to_dot(const CyclicProof& p);

// Cycles in the graph through back-edges (for reporting and tests).
std::size_t count_backedges(const CyclicProof& p);
bool uses_rule(const CyclicProof& p, Rule r);

}  // namespace igl
