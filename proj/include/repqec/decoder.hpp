#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "repqec/circuit.hpp"

namespace repqec {

/// Space-time defect m_{x,y} = s_{x,y} xor s_{x,y-1} (s_{x,-1} := 0),
/// 0-based site x and round y.
struct Defect {
    int x = 0;
    int y = 0;
};

struct DefectSet {
    std::vector<Defect> defects;
    int boundary_parity = 0;  // xor of all m_{x,y}
};

DefectSet difference_syndromes(const SyndromeGrid& s);

struct WeightingSpec {
    DecoderWeighting kind = DecoderWeighting::Uniform;
    double p = 0.0;  // physical error probability, used by the leading-order weights
};

struct LeadingOrderGraph;  // primitive fault graph, built once per (n, T, p)

/// Matching instance over 2k nodes: 0..k-1 are the defects, k..2k-1 their
/// private boundary twins. Boundary-boundary edges have weight 0.
struct MatchingGraph {
    int n = 0, T = 0;
    WeightingSpec spec;
    std::vector<Defect> defects;
    std::vector<double> weights;  // (2k)^2 row-major, symmetric
    std::shared_ptr<const LeadingOrderGraph> lo;

    int nodes() const { return 2 * static_cast<int>(defects.size()); }
    double weight(int u, int v) const { return weights[static_cast<size_t>(u) * nodes() + v]; }
};

MatchingGraph build_matching_graph(const DefectSet& d, int n, int T, const WeightingSpec& spec);

using Matching = std::vector<std::pair<int, int>>;

/// Exact minimum-weight perfect matching (blossom algorithm); pairs are
/// returned sorted for reproducibility.
Matching mwpm(const MatchingGraph& g);

/// Exhaustive minimum over all defect pairings with boundary options; the
/// test oracle for mwpm. Requires at most 12 defects.
Matching brute_force_mwpm(const MatchingGraph& g);

double matching_weight(const MatchingGraph& g, const Matching& m);

/// Folds every matched pair's shortest lattice path into the recovery mask:
/// each horizontal step between sites x and x+1 flips data qubit x+1, and a
/// boundary exit at site x flips the qubits between x and the nearer edge.
std::vector<int> recovery_from_matching(const MatchingGraph& g, const Matching& m);

/// Writes defects and matched pairs as line-oriented text for external
/// visualization.
std::string dump_matching(const MatchingGraph& g, const Matching& m);

/// Leading-order fault graph of the circuit-based model: every single-fault
/// location of the gate-level circuit contributes an edge between the defect
/// pair it creates, with probability coefficient w such that the edge fires
/// with probability w * p at leading order. Weights are -log(w p).
struct LeadingOrderEdge {
    Defect a, b;
    bool b_is_boundary = false;
    double prob_coefficient = 0.0;
    int flip_qubit = -1;  // data qubit left flipped by the fault, -1 if none
};

struct LeadingOrderGraph {
    int n = 0, T = 0;
    double p = 0.0;
    std::vector<LeadingOrderEdge> edges;

    // Dijkstra over the primitive edges; boundary is a terminal node.
    struct PathResult {
        double distance = 0.0;
        std::vector<int> flips;  // data qubits whose flips the path implies
    };
    PathResult shortest_path(const Defect& from, const Defect& to) const;
    PathResult shortest_to_boundary(const Defect& from) const;

    std::string format_table() const;
};

std::shared_ptr<const LeadingOrderGraph> leading_order_graph(int n, int T, double p);

}  // namespace repqec
