#include "amgmatch/csr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace amgmatch {

double CsrMatrix::coeff(index_t i, index_t j) const {
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values[row_offsets[i] + (it - cols.begin())];
}

void validate_canonical(const CsrMatrix& a) {
    if (a.nrows < 0 || a.ncols < 0)
        throw std::invalid_argument("CsrMatrix: negative dimension");
    if (static_cast<index_t>(a.row_offsets.size()) != a.nrows + 1)
        throw std::invalid_argument("CsrMatrix: row_offsets size mismatch");
    if (a.row_offsets.front() != 0)
        throw std::invalid_argument("CsrMatrix: row_offsets[0] != 0");
    if (a.col_indices.size() != a.values.size())
        throw std::invalid_argument("CsrMatrix: col/value size mismatch");
    if (a.row_offsets.back() != static_cast<index_t>(a.values.size()))
        throw std::invalid_argument("CsrMatrix: row_offsets back != nnz");
    for (index_t i = 0; i < a.nrows; ++i) {
        if (a.row_offsets[i] > a.row_offsets[i + 1])
            throw std::invalid_argument("CsrMatrix: decreasing row_offsets");
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            if (a.col_indices[k] < 0 || a.col_indices[k] >= a.ncols)
                throw std::invalid_argument("CsrMatrix: column out of range");
            if (k > a.row_offsets[i] && a.col_indices[k - 1] >= a.col_indices[k])
                throw std::invalid_argument(
                    "CsrMatrix: columns not strictly increasing in row " +
                    std::to_string(i));
        }
    }
}

CsrMatrix csr_from_triplets(index_t nrows, index_t ncols,
                            std::span<const Triplet> entries) {
    for (const Triplet& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
            throw std::invalid_argument("csr_from_triplets: index out of range");
    }
    // Stable sort keeps duplicates in appearance order, so they are summed
    // deterministically.
    std::vector<index_t> order(entries.size());
    std::iota(order.begin(), order.end(), index_t{0});
    std::stable_sort(order.begin(), order.end(), [&](index_t x, index_t y) {
        if (entries[x].row != entries[y].row) return entries[x].row < entries[y].row;
        return entries[x].col < entries[y].col;
    });

    CsrMatrix a;
    a.nrows = nrows;
    a.ncols = ncols;
    a.row_offsets.assign(nrows + 1, 0);
    a.col_indices.reserve(entries.size());
    a.values.reserve(entries.size());
    std::size_t k = 0;
    for (index_t i = 0; i < nrows; ++i) {
        while (k < order.size() && entries[order[k]].row == i) {
            index_t j = entries[order[k]].col;
            double v = entries[order[k]].value;
            ++k;
            while (k < order.size() && entries[order[k]].row == i &&
                   entries[order[k]].col == j) {
                v += entries[order[k]].value;
                ++k;
            }
            a.col_indices.push_back(j);
            a.values.push_back(v);
        }
        a.row_offsets[i + 1] = static_cast<index_t>(a.values.size());
    }
    validate_canonical(a);
    return a;
}

CsrMatrix csr_identity(index_t n) {
    CsrMatrix a;
    a.nrows = a.ncols = n;
    a.row_offsets.resize(n + 1);
    a.col_indices.resize(n);
    a.values.assign(n, 1.0);
    for (index_t i = 0; i <= n; ++i) a.row_offsets[i] = i;
    std::iota(a.col_indices.begin(), a.col_indices.end(), index_t{0});
    a.symmetric_hint = true;
    return a;
}

CsrMatrix csr_diagonal(const Vector& d) {
    CsrMatrix a = csr_identity(d.size());
    for (index_t i = 0; i < d.size(); ++i) a.values[i] = d[i];
    return a;
}

Vector spmv(const CsrMatrix& a, const Vector& x) {
    if (a.ncols != x.size())
        throw std::invalid_argument("spmv: dimension mismatch");
    Vector y(a.nrows);
    for (index_t i = 0; i < a.nrows; ++i) {
        double s = 0.0;
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            s += a.values[k] * x[a.col_indices[k]];
        y[i] = s;
    }
    return y;
}

CsrMatrix transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.nrows = a.ncols;
    t.ncols = a.nrows;
    t.symmetric_hint = a.symmetric_hint;
    t.row_offsets.assign(t.nrows + 1, 0);
    t.col_indices.resize(a.nnz());
    t.values.resize(a.nnz());
    for (index_t k = 0; k < a.nnz(); ++k) t.row_offsets[a.col_indices[k] + 1]++;
    for (index_t i = 0; i < t.nrows; ++i) t.row_offsets[i + 1] += t.row_offsets[i];
    std::vector<index_t> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
    // Row-major traversal of A writes each transposed row in ascending
    // column order, so the result is canonical by construction.
    for (index_t i = 0; i < a.nrows; ++i) {
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            index_t pos = next[a.col_indices[k]]++;
            t.col_indices[pos] = i;
            t.values[pos] = a.values[k];
        }
    }
    validate_canonical(t);
    return t;
}

CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b, double drop_tol) {
    if (a.ncols != b.nrows)
        throw std::invalid_argument("spgemm: dimension mismatch");
    CsrMatrix c;
    c.nrows = a.nrows;
    c.ncols = b.ncols;
    c.row_offsets.assign(a.nrows + 1, 0);

    std::vector<double> acc(b.ncols, 0.0);
    std::vector<char> touched(b.ncols, 0);
    std::vector<index_t> cols;
    cols.reserve(64);

    for (index_t i = 0; i < a.nrows; ++i) {
        cols.clear();
        for (index_t ka = a.row_offsets[i]; ka < a.row_offsets[i + 1]; ++ka) {
            const index_t k = a.col_indices[ka];
            const double av = a.values[ka];
            for (index_t kb = b.row_offsets[k]; kb < b.row_offsets[k + 1]; ++kb) {
                const index_t j = b.col_indices[kb];
                acc[j] += av * b.values[kb];
                if (!touched[j]) {
                    touched[j] = 1;
                    cols.push_back(j);
                }
            }
        }
        std::sort(cols.begin(), cols.end());
        for (index_t j : cols) {
            if (!(std::abs(acc[j]) < drop_tol)) {
                c.col_indices.push_back(j);
                c.values.push_back(acc[j]);
            }
            acc[j] = 0.0;
            touched[j] = 0;
        }
        c.row_offsets[i + 1] = static_cast<index_t>(c.values.size());
    }
    validate_canonical(c);
    return c;
}

CsrMatrix csr_axpby(double alpha, const CsrMatrix& a, double beta,
                    const CsrMatrix& b) {
    if (a.nrows != b.nrows || a.ncols != b.ncols)
        throw std::invalid_argument("csr_axpby: shape mismatch");
    CsrMatrix c;
    c.nrows = a.nrows;
    c.ncols = a.ncols;
    c.row_offsets.assign(a.nrows + 1, 0);
    for (index_t i = 0; i < a.nrows; ++i) {
        index_t ka = a.row_offsets[i], ea = a.row_offsets[i + 1];
        index_t kb = b.row_offsets[i], eb = b.row_offsets[i + 1];
        while (ka < ea || kb < eb) {
            index_t ja = ka < ea ? a.col_indices[ka] : c.ncols;
            index_t jb = kb < eb ? b.col_indices[kb] : c.ncols;
            if (ja < jb) {
                c.col_indices.push_back(ja);
                c.values.push_back(alpha * a.values[ka++]);
            } else if (jb < ja) {
                c.col_indices.push_back(jb);
                c.values.push_back(beta * b.values[kb++]);
            } else {
                c.col_indices.push_back(ja);
                c.values.push_back(alpha * a.values[ka++] + beta * b.values[kb++]);
            }
        }
        c.row_offsets[i + 1] = static_cast<index_t>(c.values.size());
    }
    validate_canonical(c);
    return c;
}

double euclidean_norm(const Vector& x) { return x.norm(); }

double inf_norm(const Vector& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

double a_norm(const Vector& x, const CsrMatrix& a) {
    if (a.nrows != a.ncols || a.ncols != x.size())
        throw std::invalid_argument("a_norm: dimension mismatch");
    Vector ax = spmv(a, x);
    double q = x.dot(ax);
    double scale = x.cwiseAbs().dot(ax.cwiseAbs());
    if (q < -1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("a_norm: negative quadratic form, matrix not SPD");
    return std::sqrt(std::max(q, 0.0));
}

double max_abs(const CsrMatrix& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

bool structurally_equal(const CsrMatrix& a, const CsrMatrix& b) {
    return a.nrows == b.nrows && a.ncols == b.ncols &&
           a.row_offsets == b.row_offsets && a.col_indices == b.col_indices;
}

bool csr_exactly_equal(const CsrMatrix& a, const CsrMatrix& b) {
    return structurally_equal(a, b) && a.values == b.values;
}

DenseMatrix to_dense(const CsrMatrix& a) {
    DenseMatrix m = DenseMatrix::Zero(a.nrows, a.ncols);
    for (index_t i = 0; i < a.nrows; ++i)
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            m(i, a.col_indices[k]) = a.values[k];
    return m;
}

CsrMatrix csr_from_dense(const DenseMatrix& m, double keep_above) {
    CsrMatrix a;
    a.nrows = m.rows();
    a.ncols = m.cols();
    a.row_offsets.assign(a.nrows + 1, 0);
    for (index_t i = 0; i < a.nrows; ++i) {
        for (index_t j = 0; j < a.ncols; ++j) {
            if (std::abs(m(i, j)) > keep_above) {
                a.col_indices.push_back(j);
                a.values.push_back(m(i, j));
            }
        }
        a.row_offsets[i + 1] = static_cast<index_t>(a.values.size());
    }
    return a;
}

} // namespace amgmatch
