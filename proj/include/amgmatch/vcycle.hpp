#pragma once

#include "amgmatch/hierarchy.hpp"
#include "amgmatch/krylov.hpp"
#include "amgmatch/smoothers.hpp"
#include "amgmatch/types.hpp"

#include <Eigen/Cholesky>

#include <memory>
#include <vector>

namespace amgmatch {

// z = B r by the recursive cycle: pre-smooth (forward sweeps), restrict the
// residual by P^T, recurse, prolong the correction by P, post-smooth
// (backward sweeps). The coarsest level applies the configured coarse solver.
// With an exact (dense) coarse solve the operator B is symmetric positive
// definite. A single-level hierarchy reduces to the coarse solve alone.
class VCyclePreconditioner {
  public:
    explicit VCyclePreconditioner(const AmgHierarchy& h);

    Vector apply(const Vector& r) const;
    PrecApply as_prec() const;

  private:
    Vector cycle(std::size_t level, const Vector& r) const;
    Vector coarsest_solve(const Vector& r) const;

    const AmgHierarchy* h_;
    std::vector<HybridGs> pre_;
    std::vector<HybridGs> post_;
    std::vector<CsrMatrix> pt_; // cached restriction operators P^T
    std::unique_ptr<BlockJacobiIlu> coarse_prec_;
    Eigen::LDLT<DenseMatrix> coarse_dense_;
};

Vector v_cycle_apply(const AmgHierarchy& h, const Vector& r);

} // namespace amgmatch
