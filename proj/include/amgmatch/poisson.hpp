#pragma once

#include "amgmatch/csr.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/types.hpp"

namespace amgmatch {

// Finite-difference Laplacian with homogeneous Dirichlet boundary and unit
// spacing: 3-point (1D), 5-point (2D), or 7-point (3D) stencil. rhs = A x_exact
// for a smooth product-of-sines x_exact, so solves can be checked against a
// known solution.
struct PoissonProblem {
    CsrMatrix a;
    Vector rhs;
    Vector x_exact;
    GridDims dims;
};

PoissonProblem gen_poisson(int dim, index_t n_per_side);

// The same operator assembled as per-rank partial rows: every grid edge
// contributes +1 to both endpoint diagonals and -1 to both off-diagonals, and
// is assigned to the rank owning its smaller endpoint; boundary faces add +1
// to the adjacent diagonal. All contributions are integers, so assembled
// values are exact regardless of rank count.
PartialRowMatrix gen_poisson_partial(int dim, index_t n_per_side,
                                     const RankPartition& part);

GridDims poisson_dims(int dim, index_t n_per_side);

} // namespace amgmatch
