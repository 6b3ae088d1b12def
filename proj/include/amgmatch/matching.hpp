#pragma once

#include "amgmatch/csr.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace amgmatch {

// Undirected weighted graph over matrix indices. One edge per unordered pair,
// stored with i < j; no self-loops.
struct GraphEdge {
    index_t i = 0;
    index_t j = 0;
    double weight = 0.0;
};

struct WeightedGraph {
    index_t n_vertices = 0;
    std::vector<GraphEdge> edges;
    // Edges whose weight evaluated non-finite and were dropped.
    index_t n_nonfinite_excluded = 0;
};

// Vertex-disjoint pair set plus the vertices left unmatched. pairs are (i, j)
// with i < j; pairs and singletons together cover every vertex exactly once.
struct Matching {
    std::vector<std::pair<index_t, index_t>> pairs;
    std::vector<index_t> singletons;
};

// Surjective map fine index -> aggregate id; ids are 0..n_coarse-1, each
// aggregate nonempty.
struct AggregationMap {
    index_t n_fine = 0;
    index_t n_coarse = 0;
    std::vector<index_t> assign;
    std::vector<index_t> aggregate_sizes;
};

void validate_matching(const Matching& m, index_t n_vertices);
void validate_aggregation(const AggregationMap& agg);

// Edge weights c_ij = 1 - 2 a_ij w_i w_j / (a_ii w_i^2 + a_jj w_j^2) over the
// symmetrized off-diagonal structure of A (pattern union, value average).
// Throws if the denominator vanishes for a stored pair; non-finite weights are
// excluded and counted.
WeightedGraph build_edge_weights(const CsrMatrix& a, const Vector& w);

// Locally-dominant-edge matching on transformed weights log(c) restricted to
// edges with c > 1. Guarantees matched transformed weight >= 1/2 of the
// optimum. Ties between equal weights go to the smaller (i, j) lexicographic
// key, which makes the result unique.
Matching half_approx_matching(const WeightedGraph& g);

// Pairs become size-2 aggregates (ordered by smaller endpoint), then
// singletons in ascending order.
AggregationMap matching_to_aggregates(const Matching& m, index_t n_vertices);

// Rank-local Vanek-style smoothed-aggregation aggregates on the diagonal
// blocks selected by `part`: strength graph |a_ij| >= theta*sqrt(a_ii a_jj),
// greedy root pass (roots need a fully unaggregated neighborhood of at least
// min_aggregate_size vertices), absorption by strongest connection, then a
// leftover sweep. Aggregates never span ranks.
AggregationMap decoupled_smoothed_aggregation(const CsrMatrix& a,
                                              const RankPartition& part,
                                              double theta,
                                              index_t min_aggregate_size = 3);

// Graphviz dump with matched edges highlighted.
std::string matching_to_dot(const WeightedGraph& g, const Matching& m);

} // namespace amgmatch
