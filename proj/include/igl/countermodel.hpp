#pragma once

#include <map>
#include <string>
#include <vector>

#include "igl/prover.hpp"
#include "igl/semantics.hpp"

namespace igl {

// A maximal run of invertible steps in a Denier tree, ending in a saturated
// or loop node.
struct Segment {
    int id = 0;
    std::vector<int> nodes;  // Denier node ids, root of the run first
    int final_node = -1;
    int parent = -1;         // segment of the saturated node this one hangs off
};

struct Countermodel {
    KripkeStructure structure;
    int root = 0;
    Environment env;  // labels of the goal sequent
    std::vector<Segment> segments;
    std::vector<int> world_of_segment;
    std::map<std::string, std::vector<int>> provenance;  // world -> segment ids
};

// One world per segment, segments on a loop collapsed into one world.
// Throws std::invalid_argument when the tree is not a valid Denier tree.
Countermodel extract_countermodel(const DenierTree& d);

struct CountermodelCheck {
    bool ok = true;
    std::string message;
};

// The goal fails at root under env, and the structure is in IGL^pred.
CountermodelCheck verify_countermodel(const KripkeStructure& k, int root, const Environment& env, Formula goal);
// Every sequent of every segment is falsified at the segment's world: its
// left formulas hold and its right formulas fail there.
CountermodelCheck verify_segments(const Countermodel& cm, const DenierTree& d);

std::string countermodel_to_json(const Countermodel& cm, bool pretty = false);

}  // namespace igl
