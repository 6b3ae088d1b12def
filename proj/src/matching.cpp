#include "amgmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace amgmatch {

void validate_matching(const Matching& m, index_t n_vertices) {
    std::vector<char> seen(n_vertices, 0);
    auto touch = [&](index_t v) {
        if (v < 0 || v >= n_vertices)
            throw std::invalid_argument("matching: vertex out of range");
        if (seen[v]) throw std::invalid_argument("matching: vertex covered twice");
        seen[v] = 1;
    };
    for (const auto& [i, j] : m.pairs) {
        if (i >= j) throw std::invalid_argument("matching: pair not ordered i < j");
        touch(i);
        touch(j);
    }
    for (index_t s : m.singletons) touch(s);
    for (index_t v = 0; v < n_vertices; ++v)
        if (!seen[v]) throw std::invalid_argument("matching: vertex not covered");
}

void validate_aggregation(const AggregationMap& agg) {
    if (static_cast<index_t>(agg.assign.size()) != agg.n_fine)
        throw std::invalid_argument("aggregation: assign size != n_fine");
    if (static_cast<index_t>(agg.aggregate_sizes.size()) != agg.n_coarse)
        throw std::invalid_argument("aggregation: size list != n_coarse");
    std::vector<index_t> counts(agg.n_coarse, 0);
    for (index_t a : agg.assign) {
        if (a < 0 || a >= agg.n_coarse)
            throw std::invalid_argument("aggregation: id out of range");
        ++counts[a];
    }
    for (index_t a = 0; a < agg.n_coarse; ++a)
        if (counts[a] != agg.aggregate_sizes[a] || counts[a] == 0)
            throw std::invalid_argument("aggregation: empty or miscounted aggregate");
}

WeightedGraph build_edge_weights(const CsrMatrix& a, const Vector& w) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("build_edge_weights: matrix not square");
    if (w.size() != a.nrows)
        throw std::invalid_argument("build_edge_weights: w length mismatch");
    validate_canonical(a);

    // Symmetrize: pattern union with value average over each unordered pair.
    std::map<std::pair<index_t, index_t>, std::pair<double, int>> sym;
    Vector diag = Vector::Zero(a.nrows);
    for (index_t i = 0; i < a.nrows; ++i) {
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            const index_t j = a.col_indices[k];
            if (j == i) {
                diag[i] = a.values[k];
                continue;
            }
            auto key = std::make_pair(std::min(i, j), std::max(i, j));
            auto& slot = sym[key];
            slot.first += a.values[k];
            slot.second += 1;
        }
    }

    WeightedGraph g;
    g.n_vertices = a.nrows;
    g.edges.reserve(sym.size());
    for (const auto& [key, slot] : sym) {
        const auto [i, j] = key;
        const double aij = slot.first / static_cast<double>(slot.second);
        const double denom = diag[i] * w[i] * w[i] + diag[j] * w[j] * w[j];
        if (denom == 0.0) {
            std::ostringstream msg;
            msg << "build_edge_weights: zero denominator for pair (" << i << ", "
                << j << ")";
            throw std::invalid_argument(msg.str());
        }
        const double c = 1.0 - 2.0 * aij * w[i] * w[j] / denom;
        if (!std::isfinite(c)) {
            ++g.n_nonfinite_excluded;
            continue;
        }
        g.edges.push_back({i, j, c});
    }
    return g;
}

namespace {

// Strict total order on eligible edges: heavier first, then smaller (i, j)
// lexicographic key. Uniqueness of the order makes the locally dominant
// matching unique.
struct EligibleEdge {
    index_t i, j;
    double w;
};

bool edge_preferred(const EligibleEdge& a, const EligibleEdge& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
}

} // namespace

Matching half_approx_matching(const WeightedGraph& g) {
    std::vector<EligibleEdge> edges;
    for (const GraphEdge& e : g.edges) {
        if (!(e.weight > 1.0)) continue;
        edges.push_back({e.i, e.j, std::log(e.weight)});
    }

    std::vector<std::vector<std::size_t>> adj(g.n_vertices);
    for (std::size_t id = 0; id < edges.size(); ++id) {
        adj[edges[id].i].push_back(id);
        adj[edges[id].j].push_back(id);
    }
    for (auto& lst : adj)
        std::sort(lst.begin(), lst.end(), [&](std::size_t a, std::size_t b) {
            return edge_preferred(edges[a], edges[b]);
        });

    std::vector<index_t> mate(g.n_vertices, -1);
    std::vector<std::size_t> cursor(g.n_vertices, 0);
    // Preferred remaining edge of a free vertex; the cursor only advances, so
    // the scan over all adjacency lists is linear overall.
    auto best = [&](index_t v) -> std::ptrdiff_t {
        auto& lst = adj[v];
        auto& c = cursor[v];
        while (c < lst.size()) {
            const EligibleEdge& e = edges[lst[c]];
            const index_t other = (e.i == v) ? e.j : e.i;
            if (mate[other] == -1) return static_cast<std::ptrdiff_t>(lst[c]);
            ++c;
        }
        return -1;
    };

    Matching m;
    std::vector<index_t> work(g.n_vertices);
    for (index_t v = 0; v < g.n_vertices; ++v) work[v] = g.n_vertices - 1 - v;
    while (!work.empty()) {
        const index_t v = work.back();
        work.pop_back();
        if (mate[v] != -1) continue;
        const std::ptrdiff_t ev = best(v);
        if (ev < 0) continue;
        const EligibleEdge& e = edges[static_cast<std::size_t>(ev)];
        const index_t u = (e.i == v) ? e.j : e.i;
        if (best(u) != ev) continue; // locally dominant only if mutual
        mate[v] = u;
        mate[u] = v;
        m.pairs.emplace_back(e.i, e.j);
        // Freed preferences: free neighbors of the matched pair re-examine.
        for (index_t endpoint : {e.i, e.j})
            for (std::size_t id : adj[endpoint]) {
                const EligibleEdge& ne = edges[id];
                const index_t other = (ne.i == endpoint) ? ne.j : ne.i;
                if (mate[other] == -1) work.push_back(other);
            }
    }

    std::sort(m.pairs.begin(), m.pairs.end());
    for (index_t v = 0; v < g.n_vertices; ++v)
        if (mate[v] == -1) m.singletons.push_back(v);
    validate_matching(m, g.n_vertices);
    return m;
}

AggregationMap matching_to_aggregates(const Matching& m, index_t n_vertices) {
    validate_matching(m, n_vertices);
    AggregationMap agg;
    agg.n_fine = n_vertices;
    agg.assign.assign(n_vertices, -1);
    index_t next = 0;
    for (const auto& [i, j] : m.pairs) {
        agg.assign[i] = agg.assign[j] = next++;
        agg.aggregate_sizes.push_back(2);
    }
    for (index_t s : m.singletons) {
        agg.assign[s] = next++;
        agg.aggregate_sizes.push_back(1);
    }
    agg.n_coarse = next;
    validate_aggregation(agg);
    return agg;
}

AggregationMap decoupled_smoothed_aggregation(const CsrMatrix& a,
                                              const RankPartition& part,
                                              double theta,
                                              index_t min_aggregate_size) {
    if (a.nrows != a.ncols || a.nrows != part.n)
        throw std::invalid_argument(
            "decoupled_smoothed_aggregation: matrix/partition size mismatch");
    if (theta < 0.0 || theta >= 1.0)
        throw std::invalid_argument(
            "decoupled_smoothed_aggregation: theta must lie in [0, 1)");
    validate_canonical(a);

    Vector diag = Vector::Zero(a.nrows);
    for (index_t i = 0; i < a.nrows; ++i) diag[i] = a.coeff(i, i);
    for (index_t i = 0; i < a.nrows; ++i)
        if (diag[i] <= 0.0)
            throw std::invalid_argument(
                "decoupled_smoothed_aggregation: nonpositive diagonal at row " +
                std::to_string(i));

    AggregationMap agg;
    agg.n_fine = a.nrows;
    agg.assign.assign(a.nrows, -1);
    index_t next = 0;

    for (int r = 0; r < part.n_ranks; ++r) {
        const auto& rows = part.local_rows[r];
        // Strength lists restricted to the rank-local diagonal block.
        std::vector<std::vector<index_t>> strong(rows.size());
        std::vector<index_t> local_of(a.nrows, -1);
        for (std::size_t li = 0; li < rows.size(); ++li)
            local_of[rows[li]] = static_cast<index_t>(li);
        for (std::size_t li = 0; li < rows.size(); ++li) {
            const index_t g = rows[li];
            for (index_t k = a.row_offsets[g]; k < a.row_offsets[g + 1]; ++k) {
                const index_t col = a.col_indices[k];
                if (col == g || local_of[col] < 0) continue;
                if (std::abs(a.values[k]) >=
                    theta * std::sqrt(diag[g] * diag[col]))
                    strong[li].push_back(local_of[col]);
            }
        }

        std::vector<index_t> block_assign(rows.size(), -1);
        std::vector<char> is_root_member(rows.size(), 0);

        // Phase 1: roots whose strong neighborhood is entirely unaggregated
        // and large enough seed aggregates.
        for (std::size_t li = 0; li < rows.size(); ++li) {
            if (block_assign[li] != -1) continue;
            bool clean = true;
            for (index_t nb : strong[li])
                if (block_assign[nb] != -1) {
                    clean = false;
                    break;
                }
            if (!clean) continue;
            if (static_cast<index_t>(strong[li].size()) + 1 < min_aggregate_size)
                continue;
            block_assign[li] = next;
            is_root_member[li] = 1;
            for (index_t nb : strong[li]) {
                block_assign[nb] = next;
                is_root_member[nb] = 1;
            }
            ++next;
            agg.aggregate_sizes.push_back(
                static_cast<index_t>(strong[li].size()) + 1);
        }

        // Phase 2: absorb leftovers into the phase-1 aggregate they connect
        // to most strongly (ties to the smaller neighbor index).
        for (std::size_t li = 0; li < rows.size(); ++li) {
            if (block_assign[li] != -1) continue;
            index_t target = -1;
            double strongest = -1.0;
            for (index_t nb : strong[li]) {
                if (!is_root_member[nb]) continue;
                const double v =
                    std::abs(a.coeff(rows[li], rows[nb]));
                if (v > strongest) {
                    strongest = v;
                    target = block_assign[nb];
                }
            }
            if (target != -1) {
                block_assign[li] = target;
                ++agg.aggregate_sizes[target];
            }
        }

        // Phase 3: sweep anything still loose into fresh aggregates with its
        // unaggregated strong neighbors (isolated vertices become singletons).
        for (std::size_t li = 0; li < rows.size(); ++li) {
            if (block_assign[li] != -1) continue;
            block_assign[li] = next;
            index_t size = 1;
            for (index_t nb : strong[li])
                if (block_assign[nb] == -1) {
                    block_assign[nb] = next;
                    ++size;
                }
            ++next;
            agg.aggregate_sizes.push_back(size);
        }

        for (std::size_t li = 0; li < rows.size(); ++li)
            agg.assign[rows[li]] = block_assign[li];
    }

    agg.n_coarse = next;
    validate_aggregation(agg);
    return agg;
}

std::string matching_to_dot(const WeightedGraph& g, const Matching& m) {
    std::vector<index_t> mate(g.n_vertices, -1);
    for (const auto& [i, j] : m.pairs) {
        mate[i] = j;
        mate[j] = i;
    }
    std::ostringstream out;
    out << "graph matching {\n";
    for (index_t v = 0; v < g.n_vertices; ++v) out << "  " << v << ";\n";
    for (const GraphEdge& e : g.edges) {
        out << "  " << e.i << " -- " << e.j << " [label=\"" << e.weight << "\"";
        if (mate[e.i] == e.j) out << ", style=bold, color=red";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace amgmatch
