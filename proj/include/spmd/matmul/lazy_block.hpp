#pragma once

#include "spmd/core/lazy.hpp"
#include "spmd/matmul/matrix.hpp"

#include <cstdint>

namespace spmd {

enum class MatrixId : std::uint8_t { a = 0, b = 1 };

/// Identity of one block of a seeded matrix.
struct BlockKey {
    std::uint64_t seed = 0;
    MatrixId matrix = MatrixId::a;
    int row = 0;
    int col = 0;
    int side = 0;

    friend bool operator==(const BlockKey&, const BlockKey&) = default;
};

/// splitmix64 step.
constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Deterministic block contents, uniform in [0, 1), depending only on the key.
MatrixD generate_block(const BlockKey& key);

/// The full n x n matrix whose (i, j) block of side n/q is generate_block.
MatrixD generate_matrix(std::uint64_t seed, MatrixId matrix, int n, int q);

/// Proxy for a seeded block, materialized on first `get()` and never again.
/// Copies share the materialized block.
class LazyBlock {
public:
    /// `materializations`, when given, is bumped once at materialization.
    explicit LazyBlock(BlockKey key, std::uint64_t* materializations = nullptr);

    const BlockKey& key() const noexcept { return key_; }
    const MatrixD& get() const { return block_.get(); }
    bool materialized() const noexcept { return block_.evaluated(); }

private:
    BlockKey key_;
    Lazy<MatrixD> block_;
};

}  // namespace spmd
