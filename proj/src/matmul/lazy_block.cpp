#include "spmd/matmul/lazy_block.hpp"

#include "spmd/matmul/serial.hpp"

namespace spmd {

MatrixD generate_block(const BlockKey& key)
{
    std::uint64_t state = key.seed * 0xd1342543de82ef95ull ^
                          (static_cast<std::uint64_t>(key.matrix) << 56) ^
                          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.row)) << 28) ^
                          static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.col));
    splitmix64(state);
    MatrixD block(key.side, key.side);
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
        for (Eigen::Index c = 0; c < block.cols(); ++c) {
            block(r, c) = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        }
    }
    return block;
}

MatrixD generate_matrix(std::uint64_t seed, MatrixId matrix, int n, int q)
{
    const BlockDecomposition dec(n, q);
    const int s = dec.block_side();
    MatrixD m(n, n);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            m.block(i * s, j * s, s, s) = generate_block({seed, matrix, i, j, s});
        }
    }
    return m;
}

LazyBlock::LazyBlock(BlockKey key, std::uint64_t* materializations)
    : key_(key), block_([key, materializations] {
          if (materializations) {
              ++*materializations;
          }
          return generate_block(key);
      })
{
}

}  // namespace spmd
