#pragma once

#include "spmd/core/context.hpp"
#include "spmd/matmul/matrix.hpp"
#include "spmd/matmul/serial.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace spmd {

struct BlockIndex {
    int row = 0;
    int col = 0;

    friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

/// The C blocks that ended up on the calling rank.
struct DistributedProduct {
    BlockDecomposition decomposition;
    std::vector<std::pair<BlockIndex, MatrixD>> blocks;
};

/// Block-row-times-block-column product over a loop of q^2 iterations. The
/// world must have p = q^3 ranks. Iteration (i, j) zips row i of A with
/// column j of B over ranks (i*q + j)*q .. (i*q + j)*q + q - 1, multiplies
/// locally and reduces to the first of them; every other rank executes the
/// iteration as a nop.
DistributedProduct generic_parallel_multiply(Context& ctx, std::uint64_t seed, int n, int q);

/// DNS-pattern product on a q x q x q grid: rank (i, j, k) multiplies
/// A_{ik} B_{kj} and a reduction along z leaves C_{ij} on (i, j, 0).
DistributedProduct grid_parallel_multiply(Context& ctx, std::uint64_t seed, int n, int q);

/// Collects every rank's blocks on world rank 0 and assembles C there.
/// Throws AssemblyError on rank 0 if a block is missing or duplicated.
std::optional<MatrixD> gather_result(Context& ctx, const DistributedProduct& product);

}  // namespace spmd
