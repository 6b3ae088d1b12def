#include "amgmatch/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace amgmatch {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

CsrMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("MatrixMarket: empty stream");

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw std::invalid_argument("MatrixMarket: bad banner: " + line);
    if (lower(format) != "coordinate")
        throw std::invalid_argument("MatrixMarket: only coordinate format supported");
    field = lower(field);
    if (field != "real" && field != "integer")
        throw std::invalid_argument("MatrixMarket: unsupported field '" + field + "'");
    symmetry = lower(symmetry);
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw std::invalid_argument("MatrixMarket: unsupported symmetry '" + symmetry + "'");

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream dims(line);
    index_t nrows = -1, ncols = -1, nnz = -1;
    dims >> nrows >> ncols >> nnz;
    if (nrows < 0 || ncols < 0 || nnz < 0)
        throw std::invalid_argument("MatrixMarket: bad size line: " + line);

    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * nnz : nnz);
    for (index_t k = 0; k < nnz; ++k) {
        index_t i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v))
            throw std::invalid_argument("MatrixMarket: truncated entry list");
        if (i < 1 || i > nrows || j < 1 || j > ncols)
            throw std::invalid_argument("MatrixMarket: entry index out of range");
        entries.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    }
    CsrMatrix a = csr_from_triplets(nrows, ncols, entries);
    a.symmetric_hint = symmetric;
    return a;
}

CsrMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a, MmSymmetry sym) {
    const bool symmetric = sym == MmSymmetry::symmetric;
    if (symmetric) {
        if (a.nrows != a.ncols)
            throw std::invalid_argument(
                "write_matrix_market: symmetric output requires a square matrix");
        // Checking every off-diagonal mirror also catches one-sided entries,
        // which the lower-triangle output would otherwise drop silently.
        for (index_t i = 0; i < a.nrows; ++i)
            for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
                index_t j = a.col_indices[k];
                if (j != i && a.coeff(j, i) != a.values[k])
                    throw std::invalid_argument(
                        "write_matrix_market: matrix is not symmetric");
            }
    }
    out << "%%MatrixMarket matrix coordinate real "
        << (symmetric ? "symmetric" : "general") << "\n";
    index_t count = 0;
    if (symmetric) {
        for (index_t i = 0; i < a.nrows; ++i)
            for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
                if (a.col_indices[k] <= i) ++count;
    } else {
        count = a.nnz();
    }
    out << a.nrows << " " << a.ncols << " " << count << "\n";
    char buf[64];
    for (index_t i = 0; i < a.nrows; ++i) {
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            index_t j = a.col_indices[k];
            if (symmetric && j > i) continue;
            // 17 significant digits: exact decimal round-trip for doubles.
            std::snprintf(buf, sizeof buf, "%.16e", a.values[k]);
            out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
        }
    }
}

void write_matrix_market_file(const std::string& path, const CsrMatrix& a,
                              MmSymmetry sym) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open file for write: " + path);
    write_matrix_market(out, a, sym);
}

} // namespace amgmatch
