#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "amgmatch/matching.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

using namespace amgmatch;

namespace {

CsrMatrix square(index_t n, const std::vector<Triplet>& t) {
    return csr_from_triplets(n, n, t);
}

CsrMatrix tridiag(index_t n) {
    std::vector<Triplet> t;
    for (index_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i + 1 < n) {
            t.push_back({i, i + 1, -1.0});
            t.push_back({i + 1, i, -1.0});
        }
    }
    return csr_from_triplets(n, n, t);
}

void scale_entry(CsrMatrix& a, index_t i, index_t j, double factor) {
    for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
        if (a.col_indices[k] == j) {
            a.values[k] *= factor;
            return;
        }
    FAIL("entry not stored");
}

} // namespace

TEST_CASE("edge weights on the 1D Laplacian are uniformly 1.5") {
    // c = 1 - 2(-1)/(2 + 2) for every neighbor pair when w is all ones.
    const index_t n = 6;
    CsrMatrix a = tridiag(n);
    WeightedGraph g = build_edge_weights(a, Vector::Ones(n));
    CHECK(g.n_vertices == n);
    CHECK(static_cast<index_t>(g.edges.size()) == n - 1);
    CHECK(g.n_nonfinite_excluded == 0);
    for (const GraphEdge& e : g.edges) {
        CHECK(e.i < e.j);
        CHECK(e.j == e.i + 1);
        CHECK(e.weight == doctest::Approx(1.5).epsilon(1e-15));
    }
}

TEST_CASE("edge weights symmetrize the stored pattern by value average") {
    // One-sided entry: average over a count of one is the value itself.
    CsrMatrix one_sided = square(2, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 1, 2.0}});
    WeightedGraph g1 = build_edge_weights(one_sided, Vector::Ones(2));
    REQUIRE(g1.edges.size() == 1);
    CHECK(g1.edges[0].weight == doctest::Approx(1.5).epsilon(1e-15));

    // Two-sided asymmetric values: (-2 + -1)/2 = -1.5, c = 1 + 3/4.
    CsrMatrix two_sided =
        square(2, {{0, 0, 2.0}, {0, 1, -2.0}, {1, 0, -1.0}, {1, 1, 2.0}});
    WeightedGraph g2 = build_edge_weights(two_sided, Vector::Ones(2));
    REQUIRE(g2.edges.size() == 1);
    CHECK(g2.edges[0].weight == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("edge weights reject a vanishing denominator and name the pair") {
    CsrMatrix a = square(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    CHECK_THROWS_WITH_AS(build_edge_weights(a, Vector::Ones(2)),
                         doctest::Contains("pair (0, 1)"),
                         std::invalid_argument);
}

TEST_CASE("edge weights drop non-finite values and count them") {
    // 2*(-1.7e308) overflows, so c evaluates to +inf for the (0, 1) pair.
    CsrMatrix a = square(3, {{0, 0, 1.0},
                                     {1, 1, 1.0},
                                     {2, 2, 1.0},
                                     {0, 1, -1.7e308},
                                     {1, 0, -1.7e308},
                                     {1, 2, -1.0},
                                     {2, 1, -1.0}});
    WeightedGraph g = build_edge_weights(a, Vector::Ones(3));
    CHECK(g.n_nonfinite_excluded == 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].i == 1);
    CHECK(g.edges[0].j == 2);
    CHECK(g.edges[0].weight == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("matching picks the dominant middle edge of a path") {
    WeightedGraph g;
    g.n_vertices = 4;
    g.edges = {{0, 1, std::exp(1.0)}, {1, 2, std::exp(1.5)},
               {2, 3, std::exp(1.0)}};
    Matching m = half_approx_matching(g);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair<index_t, index_t>{1, 2});
    CHECK(m.singletons == std::vector<index_t>{0, 3});
}

TEST_CASE("matching ignores edges with weight at or below one") {
    WeightedGraph g;
    g.n_vertices = 4;
    g.edges = {{0, 1, 1.0}, {2, 3, 0.5}};
    Matching m = half_approx_matching(g);
    CHECK(m.pairs.empty());
    CHECK(m.singletons == std::vector<index_t>{0, 1, 2, 3});

    g.edges = {{0, 1, 1.0 + 1e-7}, {2, 3, 0.5}};
    m = half_approx_matching(g);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair<index_t, index_t>{0, 1});
}

TEST_CASE("matching breaks weight ties toward the smaller pair") {
    WeightedGraph tri;
    tri.n_vertices = 3;
    tri.edges = {{0, 1, 2.0}, {0, 2, 2.0}, {1, 2, 2.0}};
    Matching m = half_approx_matching(tri);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair<index_t, index_t>{0, 1});
    CHECK(m.singletons == std::vector<index_t>{2});

    WeightedGraph cyc;
    cyc.n_vertices = 4;
    cyc.edges = {{0, 1, 3.0}, {1, 2, 3.0}, {2, 3, 3.0}, {0, 3, 3.0}};
    m = half_approx_matching(cyc);
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[0] == std::pair<index_t, index_t>{0, 1});
    CHECK(m.pairs[1] == std::pair<index_t, index_t>{2, 3});
}

TEST_CASE("matching is invariant under edge list order") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> wd(1.01, 6.0);
    for (int trial = 0; trial < 25; ++trial) {
        WeightedGraph g;
        g.n_vertices = 10;
        for (index_t i = 0; i < g.n_vertices; ++i)
            for (index_t j = i + 1; j < g.n_vertices; ++j)
                if (rng() % 100 < 40) g.edges.push_back({i, j, wd(rng)});
        Matching base = half_approx_matching(g);
        std::shuffle(g.edges.begin(), g.edges.end(), rng);
        Matching again = half_approx_matching(g);
        CHECK(base.pairs == again.pairs);
        CHECK(base.singletons == again.singletons);
    }
}

TEST_CASE("matching validation rejects malformed inputs") {
    Matching overlap;
    overlap.pairs = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(validate_matching(overlap, 3), std::invalid_argument);

    Matching unordered;
    unordered.pairs = {{2, 1}};
    unordered.singletons = {0};
    CHECK_THROWS_AS(validate_matching(unordered, 3), std::invalid_argument);

    Matching uncovered;
    uncovered.pairs = {{0, 1}};
    CHECK_THROWS_AS(validate_matching(uncovered, 3), std::invalid_argument);

    Matching out_of_range;
    out_of_range.pairs = {{0, 5}};
    out_of_range.singletons = {1, 2};
    CHECK_THROWS_AS(validate_matching(out_of_range, 3), std::invalid_argument);

    Matching good;
    good.pairs = {{0, 2}};
    good.singletons = {1};
    CHECK_NOTHROW(validate_matching(good, 3));
}

TEST_CASE("aggregates number pairs first, then singletons ascending") {
    Matching m;
    m.pairs = {{0, 2}, {4, 5}};
    m.singletons = {1, 3};
    AggregationMap agg = matching_to_aggregates(m, 6);
    CHECK(agg.n_fine == 6);
    CHECK(agg.n_coarse == 4);
    CHECK(agg.assign == std::vector<index_t>{0, 2, 0, 3, 1, 1});
    CHECK(agg.aggregate_sizes == std::vector<index_t>{2, 2, 1, 1});
}

TEST_CASE("a perfect matching yields only size-2 aggregates") {
    WeightedGraph g;
    g.n_vertices = 8;
    for (index_t i = 0; i < 8; i += 2) g.edges.push_back({i, i + 1, 5.0});
    Matching m = half_approx_matching(g);
    CHECK(m.pairs.size() == 4);
    CHECK(m.singletons.empty());
    AggregationMap agg = matching_to_aggregates(m, 8);
    CHECK(agg.n_coarse == 4);
    for (index_t s : agg.aggregate_sizes) CHECK(s == 2);
    for (index_t i = 0; i < 8; ++i) CHECK(agg.assign[i] == i / 2);
}

TEST_CASE("aggregation validation rejects inconsistent maps") {
    AggregationMap agg;
    agg.n_fine = 3;
    agg.n_coarse = 2;
    agg.assign = {0, 0, 0};
    agg.aggregate_sizes = {3, 0};
    CHECK_THROWS_AS(validate_aggregation(agg), std::invalid_argument);

    agg.assign = {0, 1, 5};
    agg.aggregate_sizes = {1, 2};
    CHECK_THROWS_AS(validate_aggregation(agg), std::invalid_argument);

    agg.assign = {0, 1, 1};
    agg.aggregate_sizes = {2, 1};
    CHECK_THROWS_AS(validate_aggregation(agg), std::invalid_argument);
}

TEST_CASE("decoupled aggregation tiles a 1D path into triples") {
    PoissonProblem prob = gen_poisson(1, 9);
    RankPartition part = make_partition(9, 1, PartitionScheme::contiguous);
    AggregationMap agg =
        decoupled_smoothed_aggregation(prob.a, part, 0.08);
    CHECK(agg.n_coarse == 3);
    CHECK(agg.assign == std::vector<index_t>{0, 0, 0, 1, 1, 1, 2, 2, 2});
    CHECK(agg.aggregate_sizes == std::vector<index_t>{3, 3, 3});
}

TEST_CASE("decoupled aggregation turns a diagonal matrix into singletons") {
    Vector d(6);
    d << 1, 2, 3, 4, 5, 6;
    CsrMatrix a = csr_diagonal(d);
    RankPartition part = make_partition(6, 1, PartitionScheme::contiguous);
    AggregationMap agg = decoupled_smoothed_aggregation(a, part, 0.5);
    CHECK(agg.n_coarse == 6);
    for (index_t s : agg.aggregate_sizes) CHECK(s == 1);
}

TEST_CASE("decoupled aggregation never crosses ranks and ignores couplings "
          "between them") {
    const index_t n = 12;
    CsrMatrix a = tridiag(n);
    RankPartition part = make_partition(n, 2, PartitionScheme::contiguous);
    AggregationMap base = decoupled_smoothed_aggregation(a, part, 0.08);

    std::set<index_t> left(base.assign.begin(), base.assign.begin() + 6);
    std::set<index_t> right(base.assign.begin() + 6, base.assign.end());
    for (index_t id : left) CHECK(right.count(id) == 0);

    // A much stronger cross-rank bond must not change the result.
    scale_entry(a, 5, 6, 1000.0);
    scale_entry(a, 6, 5, 1000.0);
    AggregationMap bumped = decoupled_smoothed_aggregation(a, part, 0.08);
    CHECK(bumped.assign == base.assign);
    CHECK(bumped.aggregate_sizes == base.aggregate_sizes);
}

TEST_CASE("decoupled aggregation validates its inputs") {
    CsrMatrix a = tridiag(4);
    RankPartition part = make_partition(4, 1, PartitionScheme::contiguous);
    CHECK_THROWS_AS(decoupled_smoothed_aggregation(a, part, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(decoupled_smoothed_aggregation(a, part, -0.1),
                    std::invalid_argument);

    CsrMatrix bad_diag = square(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}});
    RankPartition p2 = make_partition(2, 1, PartitionScheme::contiguous);
    CHECK_THROWS_AS(decoupled_smoothed_aggregation(bad_diag, p2, 0.1),
                    std::invalid_argument);

    RankPartition wrong = make_partition(5, 1, PartitionScheme::contiguous);
    CHECK_THROWS_AS(decoupled_smoothed_aggregation(a, wrong, 0.1),
                    std::invalid_argument);
}

TEST_CASE("dot output marks exactly the matched edges") {
    CsrMatrix a = tridiag(4);
    WeightedGraph g = build_edge_weights(a, Vector::Ones(4));
    Matching m = half_approx_matching(g);
    std::string dot = matching_to_dot(g, m);
    CHECK(dot.find("graph matching") != std::string::npos);
    std::size_t bold = 0, pos = 0;
    while ((pos = dot.find("style=bold", pos)) != std::string::npos) {
        ++bold;
        pos += 1;
    }
    CHECK(bold == m.pairs.size());
}
