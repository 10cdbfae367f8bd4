#pragma once

#include "spmd/core/codec.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <cstring>
#include <limits>

namespace spmd {

/// Dense row-major matrix.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatrixD = Matrix<double>;

/// Encoded as rows, cols (64-bit) followed by the row-major coefficients.
template <typename Scalar>
struct Codec<Matrix<Scalar>> {
    static void encode(const Matrix<Scalar>& m, Bytes& out)
    {
        Codec<std::uint64_t>::encode(static_cast<std::uint64_t>(m.rows()), out);
        Codec<std::uint64_t>::encode(static_cast<std::uint64_t>(m.cols()), out);
        const auto* p = reinterpret_cast<const std::byte*>(m.data());
        out.insert(out.end(), p, p + m.size() * static_cast<Eigen::Index>(sizeof(Scalar)));
    }

    static Matrix<Scalar> decode(ByteReader& in)
    {
        const auto rows = Codec<std::uint64_t>::decode(in);
        const auto cols = Codec<std::uint64_t>::decode(in);
        if (cols != 0 && rows > (UINT64_MAX / sizeof(Scalar)) / cols) {
            throw CodecError("matrix dimensions overflow");
        }
        Matrix<Scalar> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        const auto raw = in.take(static_cast<std::size_t>(rows * cols * sizeof(Scalar)));
        std::memcpy(m.data(), raw.data(), raw.size());
        return m;
    }
};

/// Largest absolute elementwise difference; infinity on shape mismatch.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar max_abs_diff(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return std::numeric_limits<typename DerivedA::RealScalar>::infinity();
    }
    if (a.size() == 0) {
        return 0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace spmd
