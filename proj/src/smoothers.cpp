#include "amgmatch/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace amgmatch {

CsrMatrix extract_diagonal_block(const CsrMatrix& a,
                                 const std::vector<index_t>& rows) {
    std::vector<index_t> local_of(a.ncols, -1);
    for (std::size_t li = 0; li < rows.size(); ++li)
        local_of[rows[li]] = static_cast<index_t>(li);
    std::vector<Triplet> entries;
    for (std::size_t li = 0; li < rows.size(); ++li) {
        const index_t g = rows[li];
        for (index_t k = a.row_offsets[g]; k < a.row_offsets[g + 1]; ++k) {
            const index_t lj = local_of[a.col_indices[k]];
            if (lj >= 0)
                entries.push_back(
                    {static_cast<index_t>(li), lj, a.values[k]});
        }
    }
    return csr_from_triplets(static_cast<index_t>(rows.size()),
                             static_cast<index_t>(rows.size()), entries);
}

HybridGs::HybridGs(const CsrMatrix& a, const RankPartition& part,
                   SmootherSpec spec)
    : a_(&a), spec_(spec) {
    if (a.nrows != a.ncols || a.nrows != part.n)
        throw std::invalid_argument("HybridGs: matrix/partition size mismatch");
    if (spec_.sweeps < 1 || spec_.damping <= 0.0)
        throw std::invalid_argument("HybridGs: need sweeps >= 1 and damping > 0");
    validate_canonical(a);

    blocks_.resize(part.n_ranks);
    for (int r = 0; r < part.n_ranks; ++r) {
        Block& blk = blocks_[r];
        blk.rows = part.local_rows[r];
        const CsrMatrix local = extract_diagonal_block(a, blk.rows);
        const index_t m = local.nrows;
        blk.diag.assign(m, 0.0);
        std::vector<Triplet> lo, up;
        for (index_t i = 0; i < m; ++i)
            for (index_t k = local.row_offsets[i]; k < local.row_offsets[i + 1];
                 ++k) {
                const index_t j = local.col_indices[k];
                if (j == i)
                    blk.diag[i] = local.values[k];
                else if (j < i)
                    lo.push_back({i, j, local.values[k]});
                else
                    up.push_back({i, j, local.values[k]});
            }
        for (index_t i = 0; i < m; ++i)
            if (blk.diag[i] == 0.0)
                throw std::invalid_argument(
                    "HybridGs: zero diagonal in block of rank " +
                    std::to_string(r) + " at global row " +
                    std::to_string(blk.rows[i]));
        blk.lower = csr_from_triplets(m, m, lo);
        blk.upper = csr_from_triplets(m, m, up);
    }
}

void HybridGs::sweep(Vector& z, const Vector& rhs, SweepDirection dir) const {
    const Vector rr = rhs - spmv(*a_, z);
    const double omega = spec_.damping;
    for (const Block& blk : blocks_) {
        const index_t m = static_cast<index_t>(blk.rows.size());
        Vector delta(m);
        if (spec_.kind == SmootherSpec::Kind::jacobi) {
            for (index_t i = 0; i < m; ++i)
                delta[i] = rr[blk.rows[i]] / (omega * blk.diag[i]);
        } else if (dir == SweepDirection::forward) {
            // omega (L + D) delta = rr  restricted to the block
            for (index_t i = 0; i < m; ++i) {
                double s = rr[blk.rows[i]] / omega;
                for (index_t k = blk.lower.row_offsets[i];
                     k < blk.lower.row_offsets[i + 1]; ++k)
                    s -= blk.lower.values[k] * delta[blk.lower.col_indices[k]];
                delta[i] = s / blk.diag[i];
            }
        } else {
            // omega (D + U) delta = rr  restricted to the block
            for (index_t i = m - 1; i >= 0; --i) {
                double s = rr[blk.rows[i]] / omega;
                for (index_t k = blk.upper.row_offsets[i];
                     k < blk.upper.row_offsets[i + 1]; ++k)
                    s -= blk.upper.values[k] * delta[blk.upper.col_indices[k]];
                delta[i] = s / blk.diag[i];
            }
        }
        for (index_t i = 0; i < m; ++i) z[blk.rows[i]] += delta[i];
    }
}

Vector HybridGs::apply(const Vector& r, SweepDirection dir) const {
    Vector z = Vector::Zero(r.size());
    for (int s = 0; s < spec_.sweeps; ++s) sweep(z, r, dir);
    return z;
}

Vector hybrid_gs_apply(const CsrMatrix& a, const RankPartition& part,
                       const SmootherSpec& spec, const Vector& r,
                       SweepDirection direction) {
    return HybridGs(a, part, spec).apply(r, direction);
}

std::vector<std::vector<index_t>> ilu1_symbolic(const CsrMatrix& block) {
    if (block.nrows != block.ncols)
        throw std::invalid_argument("ilu1_symbolic: block not square");
    validate_canonical(block);
    const index_t n = block.nrows;

    // lev(i, j) for kept entries of finished rows; fill entries carry level
    // lev(i,k) + lev(k,j) + 1 and survive when <= 1, so only level-0 pairs
    // generate fill.
    std::vector<std::vector<index_t>> pattern(n);
    std::vector<std::vector<int>> level(n);
    std::vector<int> row_lev(n, -1);
    for (index_t i = 0; i < n; ++i) {
        std::vector<index_t> touched;
        for (index_t k = block.row_offsets[i]; k < block.row_offsets[i + 1];
             ++k) {
            const index_t j = block.col_indices[k];
            if (row_lev[j] == -1) touched.push_back(j);
            row_lev[j] = 0;
        }
        // Propagate fill through finished rows, scanning the working row's
        // below-diagonal columns in ascending (elimination) order.
        std::vector<index_t> work(touched);
        std::sort(work.begin(), work.end());
        for (std::size_t wi = 0; wi < work.size(); ++wi) {
            const index_t k = work[wi];
            if (k >= i) break;
            const int lev_ik = row_lev[k];
            for (std::size_t kk = 0; kk < pattern[k].size(); ++kk) {
                const index_t j = pattern[k][kk];
                if (j <= k) continue;
                const int cand = lev_ik + level[k][kk] + 1;
                if (cand > 1) continue;
                if (row_lev[j] == -1) {
                    row_lev[j] = cand;
                    // insert keeping `work` ascending so later pivots see it
                    auto pos = std::lower_bound(work.begin() + wi + 1,
                                                work.end(), j);
                    if (j < i && (pos == work.end() || *pos != j))
                        work.insert(pos, j);
                    touched.push_back(j);
                } else if (cand < row_lev[j]) {
                    row_lev[j] = cand;
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        pattern[i] = touched;
        level[i].resize(touched.size());
        for (std::size_t t = 0; t < touched.size(); ++t)
            level[i][t] = row_lev[touched[t]];
        for (index_t j : touched) row_lev[j] = -1;
    }
    return pattern;
}

Ilu1Factor ilu1_factor(const CsrMatrix& block) {
    const auto pattern = ilu1_symbolic(block);
    const index_t n = block.nrows;

    // IKJ elimination restricted to the kept pattern, no pivoting.
    std::vector<std::vector<double>> rows(n);
    std::vector<double> dense(n, 0.0);
    std::vector<double> udiag(n, 0.0);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j : pattern[i]) dense[j] = 0.0;
        for (index_t k = block.row_offsets[i]; k < block.row_offsets[i + 1];
             ++k)
            dense[block.col_indices[k]] = block.values[k];
        for (index_t k : pattern[i]) {
            if (k >= i) break;
            const double mult = dense[k] / udiag[k];
            dense[k] = mult;
            const auto& pk = pattern[k];
            for (std::size_t kk = 0; kk < pk.size(); ++kk) {
                const index_t j = pk[kk];
                if (j <= k) continue;
                // update only positions kept for row i
                if (std::binary_search(pattern[i].begin(), pattern[i].end(), j))
                    dense[j] -= mult * rows[k][kk];
            }
        }
        rows[i].resize(pattern[i].size());
        bool has_diag = false;
        for (std::size_t t = 0; t < pattern[i].size(); ++t) {
            rows[i][t] = dense[pattern[i][t]];
            if (pattern[i][t] == i) {
                udiag[i] = dense[i];
                has_diag = true;
            }
        }
        if (!has_diag || udiag[i] == 0.0)
            throw std::invalid_argument("ilu1_factor: zero pivot at row " +
                                        std::to_string(i));
    }

    Ilu1Factor f;
    std::vector<Triplet> lo, up;
    for (index_t i = 0; i < n; ++i) {
        lo.push_back({i, i, 1.0});
        for (std::size_t t = 0; t < pattern[i].size(); ++t) {
            const index_t j = pattern[i][t];
            if (j < i)
                lo.push_back({i, j, rows[i][t]});
            else
                up.push_back({i, j, rows[i][t]});
        }
    }
    f.l = csr_from_triplets(n, n, lo);
    f.u = csr_from_triplets(n, n, up);
    return f;
}

Vector ilu1_solve(const Ilu1Factor& f, const Vector& rhs) {
    const index_t n = f.l.nrows;
    if (rhs.size() != n)
        throw std::invalid_argument("ilu1_solve: rhs length mismatch");
    Vector y(n);
    for (index_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (index_t k = f.l.row_offsets[i]; k < f.l.row_offsets[i + 1]; ++k) {
            const index_t j = f.l.col_indices[k];
            if (j < i) s -= f.l.values[k] * y[j];
        }
        y[i] = s; // unit diagonal
    }
    Vector z(n);
    for (index_t i = n - 1; i >= 0; --i) {
        double s = y[i];
        double d = 0.0;
        for (index_t k = f.u.row_offsets[i]; k < f.u.row_offsets[i + 1]; ++k) {
            const index_t j = f.u.col_indices[k];
            if (j == i)
                d = f.u.values[k];
            else
                s -= f.u.values[k] * z[j];
        }
        z[i] = s / d;
    }
    return z;
}

BlockJacobiIlu::BlockJacobiIlu(const CsrMatrix& a, const RankPartition& part)
    : n_(a.nrows) {
    if (a.nrows != a.ncols || a.nrows != part.n)
        throw std::invalid_argument(
            "BlockJacobiIlu: matrix/partition size mismatch");
    blocks_.resize(part.n_ranks);
    for (int r = 0; r < part.n_ranks; ++r) {
        blocks_[r].rows = part.local_rows[r];
        blocks_[r].factor =
            ilu1_factor(extract_diagonal_block(a, blocks_[r].rows));
    }
}

Vector BlockJacobiIlu::apply(const Vector& r) const {
    Vector z = Vector::Zero(n_);
    for (const Block& blk : blocks_) {
        const index_t m = static_cast<index_t>(blk.rows.size());
        Vector rb(m);
        for (index_t i = 0; i < m; ++i) rb[i] = r[blk.rows[i]];
        const Vector zb = ilu1_solve(blk.factor, rb);
        for (index_t i = 0; i < m; ++i) z[blk.rows[i]] = zb[i];
    }
    return z;
}

} // namespace amgmatch
