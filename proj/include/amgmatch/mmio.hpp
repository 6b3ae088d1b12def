#pragma once

/// @file mmio.hpp
/// @brief MatrixMarket coordinate reader/writer (real, general or symmetric).

#include "amgmatch/csr.hpp"

#include <iosfwd>
#include <string>

namespace amgmatch {

enum class MmSymmetry { general, symmetric };

CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market_file(const std::string& path);

/// Writes coordinate format with 17 significant digits, so a read of the
/// written file reproduces every value bit-exactly. With `symmetric` only
/// the lower triangle is emitted; the matrix must actually be symmetric.
void write_matrix_market(std::ostream& out, const CsrMatrix& a,
                         MmSymmetry sym = MmSymmetry::general);
void write_matrix_market_file(const std::string& path, const CsrMatrix& a,
                              MmSymmetry sym = MmSymmetry::general);

} // namespace amgmatch
