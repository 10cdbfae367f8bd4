#include "spmd/matmul/matrix_io.hpp"

#include "spmd/errors.hpp"

#include <istream>
#include <limits>
#include <ostream>

namespace spmd {

void write_matrix(std::ostream& out, const MatrixD& m)
{
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) {
                out << ' ';
            }
            out << m(r, c);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

MatrixD read_matrix(std::istream& in)
{
    long rows = -1;
    long cols = -1;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
        throw CodecError("matrix text: expected 'rows cols' header");
    }
    MatrixD m(rows, cols);
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            if (!(in >> m(r, c))) {
                throw CodecError("matrix text: missing entry (" + std::to_string(r) + "," +
                                 std::to_string(c) + ")");
            }
        }
    }
    return m;
}

}  // namespace spmd
