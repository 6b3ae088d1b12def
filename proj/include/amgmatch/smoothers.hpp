#pragma once

#include "amgmatch/csr.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/types.hpp"

#include <vector>

namespace amgmatch {

enum class SweepDirection { forward, backward };

struct SmootherSpec {
    enum class Kind { hybrid_fgs, hybrid_bgs, jacobi };
    Kind kind = Kind::hybrid_fgs;
    int sweeps = 4;
    double damping = 1.0;
};

// Stationary smoother with M = blockdiag(omega (L_pp + D_pp)) over the
// rank-local diagonal blocks (transposed blocks for backward sweeps); coupling
// between blocks enters only through the residual. With one rank this is
// exact damped forward/backward Gauss-Seidel.
class HybridGs {
  public:
    HybridGs(const CsrMatrix& a, const RankPartition& part, SmootherSpec spec);

    // One sweep z <- z + M^-1 (rhs - A z), in place.
    void sweep(Vector& z, const Vector& rhs, SweepDirection dir) const;

    // spec.sweeps sweeps from z = 0.
    Vector apply(const Vector& r, SweepDirection dir) const;

    const SmootherSpec& spec() const { return spec_; }

  private:
    struct Block {
        std::vector<index_t> rows;            // global rows, ascending
        CsrMatrix lower;                      // strictly lower, local indices
        CsrMatrix upper;                      // strictly upper, local indices
        std::vector<double> diag;
    };
    const CsrMatrix* a_;
    SmootherSpec spec_;
    std::vector<Block> blocks_;
};

Vector hybrid_gs_apply(const CsrMatrix& a, const RankPartition& part,
                       const SmootherSpec& spec, const Vector& r,
                       SweepDirection direction);

// Incomplete LU with one level of fill. L is unit lower triangular (unit
// diagonal stored), U upper triangular; pattern(L + U) is the level-<=1
// symbolic fill pattern of the block.
struct Ilu1Factor {
    CsrMatrix l;
    CsrMatrix u;
};

// Symbolic pattern: lev = 0 on pattern(A); a fill entry gets
// min_k lev(i,k) + lev(k,j) + 1 and survives when <= 1. Row-major per-row
// patterns of the kept entries, columns ascending.
std::vector<std::vector<index_t>> ilu1_symbolic(const CsrMatrix& block);

Ilu1Factor ilu1_factor(const CsrMatrix& block);
Vector ilu1_solve(const Ilu1Factor& f, const Vector& rhs);

// One-shot block-Jacobi application with per-block ILU(1) solves.
class BlockJacobiIlu {
  public:
    BlockJacobiIlu(const CsrMatrix& a, const RankPartition& part);
    Vector apply(const Vector& r) const;

  private:
    struct Block {
        std::vector<index_t> rows;
        Ilu1Factor factor;
    };
    std::vector<Block> blocks_;
    index_t n_;
};

// Rank-local diagonal sub-block of `a` on the given global rows, reindexed to
// local contiguous indices.
CsrMatrix extract_diagonal_block(const CsrMatrix& a,
                                 const std::vector<index_t>& rows);

} // namespace amgmatch
