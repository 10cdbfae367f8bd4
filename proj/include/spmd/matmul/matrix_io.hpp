#pragma once

#include "spmd/matmul/matrix.hpp"

#include <iosfwd>

namespace spmd {

/// Text format: `rows cols` on the first line, then one line per row of
/// space-separated decimals printed with round-trip precision.
void write_matrix(std::ostream& out, const MatrixD& m);
MatrixD read_matrix(std::istream& in);

}  // namespace spmd
