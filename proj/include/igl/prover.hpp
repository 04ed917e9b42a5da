#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "igl/proof.hpp"

namespace igl {

enum class CompanionPolicy { ancestors_only, global };

struct SearchConfig {
    SystemId system = SystemId::mIK4;
    int max_labels = 12;
    int max_depth = 400;
    CompanionPolicy companion_policy = CompanionPolicy::ancestors_only;
    std::size_t max_nodes = 200000;
    bool allow_cut_fallback = true;  // IK4 only: reduce an mIK4 proof when direct search fails
};

// A failed search, as a tree. Step nodes carry the invertible rule applied
// and the one premiss Denier chose; Saturated nodes list every non-invertible
// successor; Loop nodes repeat an ancestor up to `loop_renaming`.
struct DenierNode {
    enum class Kind { Step, Saturated, Loop };
    Sequent sequent;
    Kind kind = Kind::Saturated;
    std::optional<Rule> rule;
    std::vector<int> children;
    int loop_target = -1;
    Renaming loop_renaming;  // target labels -> labels here
};

struct DenierTree {
    SystemId system = SystemId::mIK4;
    int root = 0;
    std::vector<DenierNode> nodes;
};

// Shape checks: no closable node, saturation at Saturated/Loop nodes, every
// non-invertible successor present, loops equal up to renaming and not
// progressing. Returns the first problem.
std::optional<std::string> validate_denier_tree(const DenierTree& d);
std::string denier_to_json(const DenierTree& d, bool pretty = false);
DenierTree denier_from_json(const std::string& text);
// The tree as a proof graph (children as premisses, loops as back-edges),
// so the trace machinery applies.
CyclicProof denier_graph(const DenierTree& d);

enum class Verdict { Provable, Refutable, Unknown };
std::string verdict_name(Verdict v);

struct SearchStats {
    std::size_t nodes = 0;
    std::size_t max_phase_steps = 0;  // longest run of invertible steps
    std::size_t companions_tried = 0;
};

struct SearchOutcome {
    Verdict verdict = Verdict::Unknown;
    std::optional<CyclicProof> proof;
    std::optional<DenierTree> denier;
    std::string reason;             // why Unknown, or which route produced the verdict
    std::vector<Sequent> frontier;  // open sequents at the bound
    SearchStats stats;
};

struct PhaseNode {
    Sequent sequent;
    std::optional<RuleInstance> step;
    std::vector<int> children;
    bool closed = false;
    bool saturated = false;
};

struct PhaseTree {
    std::vector<PhaseNode> nodes;  // node 0 is the root
    std::size_t steps() const;
};

// The next invertible step: tr first, then the first contraction-retaining
// macro instance. nullopt when saturated.
std::optional<RuleInstance> next_invertible(const Sequent& s, SystemId sys);
// Full invertible phase from s. nullopt if a sequent exceeds max_labels.
std::optional<PhaseTree> invertible_phase(const Sequent& s, SystemId sys = SystemId::mIK4,
                                          int max_labels = 12);

// impR / boxR successors of a saturated sequent, dropping the rest of Δ.
std::vector<RuleInstance> noninvertible_instances(const Sequent& s);
std::vector<Sequent> noninvertible_expand(const Sequent& s);

struct Companion {
    int index;
    Renaming renaming;  // history labels -> labels of s
};

// First history entry equal to s up to an injective renaming, oldest first.
std::optional<Companion> detect_companion(const Sequent& s, const std::vector<Sequent>& history);

// Injective renamings sigma with sigma(small) contained in big (rel as sets,
// sides as multisets). The callback returns true to stop.
void for_each_embedding(const Sequent& small, const Sequent& big,
                        const std::function<bool(const Renaming&)>& f);

// Bottom-up search from => x:f in cfg.system. For IK4 this runs the IGL
// strategy (see prove_igl).
SearchOutcome prove(Formula f, const SearchConfig& cfg = {});
SearchOutcome prove_sequent(const Sequent& s, const SearchConfig& cfg = {});

// IK4: direct single-succedent search; a refutation comes from an mIK4
// Denier tree; an mIK4 proof that direct search missed is pushed through
// cut reduction when allowed.
SearchOutcome prove_igl(Formula f, const SearchConfig& cfg = {});

// Root label of search goals.
inline const Label kRootLabel = "x";

}  // namespace igl
