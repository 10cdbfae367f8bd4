#pragma once

#include "spmd/errors.hpp"
#include "spmd/matmul/matrix.hpp"

#include <Eigen/Dense>

#include <string>

namespace spmd {

/// Square n x n matrices cut into q x q blocks of side n/q.
class BlockDecomposition {
public:
    /// Throws DecompositionError unless q >= 1 and q divides n.
    BlockDecomposition(int n, int q) : n_(n), q_(q)
    {
        if (q < 1 || n < 1) {
            throw DecompositionError("need n >= 1 and q >= 1, got n=" + std::to_string(n) +
                                     " q=" + std::to_string(q));
        }
        if (n % q != 0) {
            throw DecompositionError("q=" + std::to_string(q) + " does not divide n=" +
                                     std::to_string(n));
        }
    }

    int n() const noexcept { return n_; }
    int q() const noexcept { return q_; }
    int block_side() const noexcept { return n_ / q_; }
    /// Words per block, (n/q)^2.
    long block_words() const noexcept { return static_cast<long>(block_side()) * block_side(); }

    friend bool operator==(const BlockDecomposition&, const BlockDecomposition&) = default;

private:
    int n_;
    int q_;
};

/// c += a * b with a plain triple loop. Every c(i, j) accumulates its
/// products in ascending k, so splitting k into consecutive chunks and
/// accumulating chunk by chunk reproduces the unsplit result bit for bit.
template <typename DerivedA, typename DerivedB, typename DerivedC>
void multiply_accumulate(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                         const Eigen::MatrixBase<DerivedC>& c_)
{
    auto& c = const_cast<Eigen::MatrixBase<DerivedC>&>(c_);
    if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
        throw ShapeError("multiply: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                         " into " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            const auto aik = a(i, k);
            for (Eigen::Index j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
}

/// (AB)_{ij} = sum_k A_{ik} B_{kj}, summed in ascending k. Reference for every
/// parallel variant.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> serial_multiply(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedB>& b)
{
    if (a.cols() != b.rows()) {
        throw ShapeError("serial_multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
    }
    Matrix<typename DerivedA::Scalar> c = Matrix<typename DerivedA::Scalar>::Zero(a.rows(), b.cols());
    multiply_accumulate(a, b, c);
    return c;
}

/// C_{ij} = sum_k A_{ik} B_{kj} over q x q blocks, accumulated in place.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> serial_blocked(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b, int q)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw ShapeError("serial_blocked expects two square matrices of the same size");
    }
    const BlockDecomposition dec(static_cast<int>(a.rows()), q);
    const Eigen::Index s = dec.block_side();
    Matrix<typename DerivedA::Scalar> c = Matrix<typename DerivedA::Scalar>::Zero(a.rows(), b.cols());
    for (int bi = 0; bi < q; ++bi) {
        for (int bj = 0; bj < q; ++bj) {
            for (int bk = 0; bk < q; ++bk) {
                multiply_accumulate(a.block(bi * s, bk * s, s, s), b.block(bk * s, bj * s, s, s),
                                    c.block(bi * s, bj * s, s, s));
            }
        }
    }
    return c;
}

}  // namespace spmd
