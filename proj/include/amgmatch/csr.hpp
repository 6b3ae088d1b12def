#pragma once

/// @file csr.hpp
/// @brief Compressed sparse row matrix storage and the kernels built on it.
///
/// CsrMatrix is the single sparse representation used at every level of the
/// solver stack. All kernels keep a fixed left-to-right summation order so
/// repeated runs produce bit-identical results.

#include "amgmatch/types.hpp"

#include <span>
#include <vector>

namespace amgmatch {

/// One explicit entry, used when assembling from coordinate data.
struct Triplet {
    index_t row = 0;
    index_t col = 0;
    double value = 0.0;
};

/// Sparse matrix in canonical CSR form: within each row the column indices
/// are strictly increasing and no (row, col) pair is stored twice.
struct CsrMatrix {
    index_t nrows = 0;
    index_t ncols = 0;
    std::vector<index_t> row_offsets;  ///< size nrows+1, non-decreasing, [0]=0
    std::vector<index_t> col_indices;
    std::vector<double> values;
    bool symmetric_hint = false;  ///< advisory only; never assumed by kernels

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    std::span<const index_t> row_cols(index_t i) const {
        return {col_indices.data() + row_offsets[i],
                static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i])};
    }
    std::span<const double> row_vals(index_t i) const {
        return {values.data() + row_offsets[i],
                static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i])};
    }

    /// Value at (i, j), 0 if not stored. Binary search within the row.
    double coeff(index_t i, index_t j) const;
};

/// Throws std::invalid_argument if the matrix violates canonical form.
void validate_canonical(const CsrMatrix& a);

/// Builds a canonical matrix from coordinate entries. Duplicate (row, col)
/// pairs are summed in their order of appearance in `entries`.
CsrMatrix csr_from_triplets(index_t nrows, index_t ncols,
                            std::span<const Triplet> entries);

CsrMatrix csr_identity(index_t n);
CsrMatrix csr_diagonal(const Vector& d);

/// y = A x, each row summed over its stored entries in column order.
Vector spmv(const CsrMatrix& a, const Vector& x);

/// A^T in canonical form.
CsrMatrix transpose(const CsrMatrix& a);

/// Sparse product C = A B. Per output row the contributions are accumulated
/// over A's stored entries in column order, then over B's row in column
/// order. Entries with |c_ij| < drop_tol are dropped; the default keeps
/// everything that is structurally reachable, including exact cancellations.
CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b, double drop_tol = 0.0);

/// C = alpha A + beta B with matching shapes; canonical output.
CsrMatrix csr_axpby(double alpha, const CsrMatrix& a, double beta,
                    const CsrMatrix& b);

double euclidean_norm(const Vector& x);
double inf_norm(const Vector& x);

/// sqrt(x^T A x) for SPD A. Throws if the quadratic form is negative beyond
/// a 1e-12 relative slack (signals a non-SPD matrix).
double a_norm(const Vector& x, const CsrMatrix& a);

/// Largest absolute stored entry (0 for an empty matrix).
double max_abs(const CsrMatrix& a);

/// Same sparsity pattern and dimensions.
bool structurally_equal(const CsrMatrix& a, const CsrMatrix& b);

/// Pattern and bitwise-identical values.
bool csr_exactly_equal(const CsrMatrix& a, const CsrMatrix& b);

DenseMatrix to_dense(const CsrMatrix& a);
CsrMatrix csr_from_dense(const DenseMatrix& m, double keep_above = 0.0);

} // namespace amgmatch
