#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "amgmatch/partition.hpp"
#include "amgmatch/poisson.hpp"
#include "amgmatch/smoothers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

using namespace amgmatch;

namespace {

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

// Random diagonally dominant matrix, not symmetric in general.
CsrMatrix random_dominant(index_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> vd(-1.0, 1.0);
    std::vector<Triplet> t;
    std::vector<double> row_abs(n, 0.0);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j) {
            if (i == j || rng() % 100 >= 30) continue;
            const double v = vd(rng);
            t.push_back({i, j, v});
            row_abs[i] += std::abs(v);
        }
    for (index_t i = 0; i < n; ++i) t.push_back({i, i, row_abs[i] + 1.0});
    return csr_from_triplets(n, n, t);
}

// M = blockdiag over ranks of omega*(L_pp + D_pp), or its transpose-shaped
// counterpart omega*(D_pp + U_pp) for backward sweeps.
DenseMatrix hybrid_m_dense(const CsrMatrix& a, const RankPartition& part,
                           double omega, SweepDirection dir) {
    DenseMatrix ad = to_dense(a);
    DenseMatrix m = DenseMatrix::Zero(a.nrows, a.ncols);
    for (int r = 0; r < part.n_ranks; ++r)
        for (index_t gi : part.local_rows[r])
            for (index_t gj : part.local_rows[r]) {
                const bool keep = dir == SweepDirection::forward ? gj <= gi
                                                                 : gj >= gi;
                if (keep) m(gi, gj) = omega * ad(gi, gj);
            }
    return m;
}

// Min-plus level-of-fill oracle in elimination order; keeps levels <= 1.
std::vector<std::vector<index_t>> level_fill_oracle(const CsrMatrix& a) {
    const index_t n = a.nrows;
    const int inf = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<int>> lev(n, std::vector<int>(n, inf));
    for (index_t i = 0; i < n; ++i) {
        lev[i][i] = 0;
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            lev[i][a.col_indices[k]] = 0;
    }
    for (index_t k = 0; k < n; ++k)
        for (index_t i = k + 1; i < n; ++i)
            for (index_t j = k + 1; j < n; ++j)
                lev[i][j] = std::min(lev[i][j], lev[i][k] + lev[k][j] + 1);
    std::vector<std::vector<index_t>> pat(n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j)
            if (lev[i][j] <= 1) pat[i].push_back(j);
    return pat;
}

} // namespace

TEST_CASE("one sweep solves a diagonal system exactly") {
    Vector d(4);
    d << 2, 3, 4, 5;
    CsrMatrix a = csr_diagonal(d);
    RankPartition part = make_partition(4, 2, PartitionScheme::contiguous);
    Vector rhs(4);
    rhs << 4, 9, 16, 25;
    for (auto kind : {SmootherSpec::Kind::hybrid_fgs,
                      SmootherSpec::Kind::hybrid_bgs,
                      SmootherSpec::Kind::jacobi}) {
        SmootherSpec spec;
        spec.kind = kind;
        HybridGs gs(a, part, spec);
        Vector z = Vector::Zero(4);
        gs.sweep(z, rhs, SweepDirection::forward);
        CHECK((z - Vector(rhs.cwiseQuotient(d))).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("forward sweep on the 1D Laplacian reproduces hand values") {
    CsrMatrix a = tridiag(4);
    RankPartition part = make_partition(4, 1, PartitionScheme::contiguous);
    HybridGs gs(a, part, SmootherSpec{});
    Vector r = Vector::Zero(4);
    r[0] = 1.0;
    Vector z = Vector::Zero(4);
    gs.sweep(z, r, SweepDirection::forward);
    Vector expect(4);
    expect << 0.5, 0.25, 0.125, 0.0625;
    CHECK((z - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-rank sweeps match the dense triangular solve") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (double damping : {1.0, 1.3}) {
        CsrMatrix a = random_dominant(12, rng);
        RankPartition part = make_partition(12, 1, PartitionScheme::contiguous);
        Vector rhs(12), z0(12);
        for (index_t i = 0; i < 12; ++i) {
            rhs[i] = nd(rng);
            z0[i] = nd(rng);
        }
        for (auto dir : {SweepDirection::forward, SweepDirection::backward}) {
            SmootherSpec spec;
            spec.kind = dir == SweepDirection::forward
                            ? SmootherSpec::Kind::hybrid_fgs
                            : SmootherSpec::Kind::hybrid_bgs;
            spec.damping = damping;
            HybridGs gs(a, part, spec);
            Vector z = z0;
            gs.sweep(z, rhs, dir);

            DenseMatrix m = hybrid_m_dense(a, part, damping, dir);
            Vector oracle =
                z0 + m.fullPivLu().solve((rhs - spmv(a, z0)).eval());
            CHECK((z - oracle).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("multi-rank sweeps use only the rank-diagonal blocks of M") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd(0.0, 1.0);
    CsrMatrix a = random_dominant(15, rng);
    Vector rhs(15), z0(15);
    for (index_t i = 0; i < 15; ++i) {
        rhs[i] = nd(rng);
        z0[i] = nd(rng);
    }
    for (int ranks : {2, 3}) {
        RankPartition part =
            make_partition(15, ranks, PartitionScheme::contiguous);
        for (auto dir : {SweepDirection::forward, SweepDirection::backward}) {
            SmootherSpec spec;
            spec.kind = dir == SweepDirection::forward
                            ? SmootherSpec::Kind::hybrid_fgs
                            : SmootherSpec::Kind::hybrid_bgs;
            HybridGs gs(a, part, spec);
            Vector z = z0;
            gs.sweep(z, rhs, dir);

            DenseMatrix m = hybrid_m_dense(a, part, 1.0, dir);
            Vector oracle =
                z0 + m.fullPivLu().solve((rhs - spmv(a, z0)).eval());
            CHECK((z - oracle).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("jacobi kind divides the residual by the scaled diagonal") {
    CsrMatrix a = tridiag(5);
    RankPartition part = make_partition(5, 2, PartitionScheme::contiguous);
    SmootherSpec spec;
    spec.kind = SmootherSpec::Kind::jacobi;
    spec.damping = 2.0;
    HybridGs gs(a, part, spec);
    Vector r(5);
    r << 1, 2, 3, 4, 5;
    Vector z = Vector::Zero(5);
    gs.sweep(z, r, SweepDirection::forward);
    CHECK((z - Vector(r / 4.0)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("apply runs spec.sweeps sweeps from zero") {
    CsrMatrix a = tridiag(8);
    RankPartition part = make_partition(8, 2, PartitionScheme::contiguous);
    SmootherSpec spec;
    spec.sweeps = 3;
    HybridGs gs(a, part, spec);
    Vector r(8);
    for (index_t i = 0; i < 8; ++i) r[i] = std::sin(1.0 + i);

    Vector manual = Vector::Zero(8);
    for (int s = 0; s < 3; ++s) gs.sweep(manual, r, SweepDirection::forward);
    Vector z = gs.apply(r, SweepDirection::forward);
    CHECK((z - manual).cwiseAbs().maxCoeff() == 0.0);

    Vector free_fn = hybrid_gs_apply(a, part, spec, r, SweepDirection::forward);
    CHECK((z - free_fn).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("repeated sweeps contract the error on an SPD system") {
    PoissonProblem prob = gen_poisson(1, 16);
    RankPartition part = make_partition(16, 1, PartitionScheme::contiguous);
    HybridGs gs(prob.a, part, SmootherSpec{});
    Vector z = Vector::Zero(16);
    double prev = (prob.x_exact - z).norm();
    for (int s = 0; s < 4; ++s) {
        gs.sweep(z, prob.rhs, SweepDirection::forward);
        const double err = (prob.x_exact - z).norm();
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("smoother constructor validates its inputs") {
    CsrMatrix a = tridiag(4);
    RankPartition part = make_partition(4, 1, PartitionScheme::contiguous);
    SmootherSpec bad;
    bad.sweeps = 0;
    CHECK_THROWS_AS(HybridGs(a, part, bad), std::invalid_argument);
    bad.sweeps = 1;
    bad.damping = 0.0;
    CHECK_THROWS_AS(HybridGs(a, part, bad), std::invalid_argument);

    std::vector<Triplet> t = {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0},
                              {1, 1, 2.0}, {2, 2, 2.0}, {3, 1, 1.0}};
    CsrMatrix hole = csr_from_triplets(4, 4, t);
    CHECK_THROWS_WITH_AS(HybridGs(hole, part, SmootherSpec{}),
                         doctest::Contains("global row 3"),
                         std::invalid_argument);

    RankPartition wrong = make_partition(5, 1, PartitionScheme::contiguous);
    CHECK_THROWS_AS(HybridGs(a, wrong, SmootherSpec{}), std::invalid_argument);
}

TEST_CASE("ilu1 factors a tridiagonal matrix exactly") {
    CsrMatrix a = tridiag(12);
    Ilu1Factor f = ilu1_factor(a);
    for (index_t i = 0; i < 12; ++i) CHECK(f.l.coeff(i, i) == 1.0);
    DenseMatrix lu = to_dense(f.l) * to_dense(f.u);
    CHECK((lu - to_dense(a)).cwiseAbs().maxCoeff() <= 1e-13);

    Vector rhs(12);
    for (index_t i = 0; i < 12; ++i) rhs[i] = std::cos(0.3 * i);
    Vector x = ilu1_solve(f, rhs);
    CHECK((spmv(a, x) - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("ilu1 symbolic pattern matches the min-plus oracle") {
    for (index_t n : {3, 4}) {
        PoissonProblem prob = gen_poisson(2, n);
        auto pat = ilu1_symbolic(prob.a);
        auto oracle = level_fill_oracle(prob.a);
        REQUIRE(pat.size() == oracle.size());
        for (std::size_t i = 0; i < pat.size(); ++i) CHECK(pat[i] == oracle[i]);
    }
}

TEST_CASE("ilu1 residual vanishes on the kept pattern") {
    PoissonProblem prob = gen_poisson(2, 4);
    Ilu1Factor f = ilu1_factor(prob.a);
    DenseMatrix resid = to_dense(f.l) * to_dense(f.u) - to_dense(prob.a);
    auto pat = ilu1_symbolic(prob.a);
    for (std::size_t i = 0; i < pat.size(); ++i)
        for (index_t j : pat[i])
            CHECK(std::abs(resid(static_cast<index_t>(i), j)) <= 1e-13);
}

TEST_CASE("ilu1 rejects bad blocks") {
    CsrMatrix flip =
        csr_from_triplets(2, 2, std::vector<Triplet>{{0, 1, 1.0}, {1, 0, 1.0}});
    CHECK_THROWS_WITH_AS(ilu1_factor(flip), doctest::Contains("zero pivot"),
                         std::invalid_argument);

    CsrMatrix rect =
        csr_from_triplets(2, 3, std::vector<Triplet>{{0, 0, 1.0}});
    CHECK_THROWS_AS(ilu1_symbolic(rect), std::invalid_argument);

    Ilu1Factor f = ilu1_factor(tridiag(4));
    CHECK_THROWS_AS(ilu1_solve(f, Vector::Ones(5)), std::invalid_argument);
}

TEST_CASE("block jacobi ilu on one rank is a global ilu solve") {
    PoissonProblem prob = gen_poisson(2, 4);
    RankPartition part = make_partition(16, 1, PartitionScheme::contiguous);
    BlockJacobiIlu bj(prob.a, part);
    Vector r(16);
    for (index_t i = 0; i < 16; ++i) r[i] = std::sin(0.7 * i);
    Vector direct = ilu1_solve(ilu1_factor(prob.a), r);
    CHECK((bj.apply(r) - direct).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("block jacobi ilu solves each rank block independently") {
    PoissonProblem prob = gen_poisson(2, 4);
    RankPartition part = make_partition(16, 3, PartitionScheme::contiguous);
    BlockJacobiIlu bj(prob.a, part);
    Vector r(16);
    for (index_t i = 0; i < 16; ++i) r[i] = std::cos(0.2 * i * i);
    Vector z = bj.apply(r);
    for (int rank = 0; rank < 3; ++rank) {
        const auto& rows = part.local_rows[rank];
        CsrMatrix block = extract_diagonal_block(prob.a, rows);
        Vector rb(static_cast<index_t>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) rb[i] = r[rows[i]];
        Vector zb = ilu1_solve(ilu1_factor(block), rb);
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(z[rows[i]] == zb[i]);
    }
}

TEST_CASE("diagonal block extraction reindexes to local contiguous rows") {
    PoissonProblem prob = gen_poisson(2, 3);
    std::vector<index_t> rows = {2, 4, 5};
    CsrMatrix block = extract_diagonal_block(prob.a, rows);
    DenseMatrix ad = to_dense(prob.a);
    DenseMatrix expect(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) expect(i, j) = ad(rows[i], rows[j]);
    CHECK((to_dense(block) - expect).cwiseAbs().maxCoeff() == 0.0);

    // Rows with no mutual couplings give a pure diagonal block.
    CsrMatrix spread = extract_diagonal_block(tridiag(5), {0, 2, 4});
    CHECK(spread.nnz() == 3);
    for (index_t i = 0; i < 3; ++i) CHECK(spread.coeff(i, i) == 2.0);
}
