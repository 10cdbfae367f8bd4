#include "spmd/matmul/parallel.hpp"

#include "spmd/core/dist_seq.hpp"
#include "spmd/grid/grid.hpp"
#include "spmd/matmul/lazy_block.hpp"
#include "spmd/transport/collectives.hpp"

#include <numeric>
#include <string>

namespace spmd {

namespace {

void require_cube_world(const Context& ctx, int q)
{
    if (q < 1 || ctx.size() != q * q * q) {
        throw TopologyError("matrix multiply with q=" + std::to_string(q) + " needs " +
                            std::to_string(q * q * q) + " ranks, world has " +
                            std::to_string(ctx.size()));
    }
}

MatrixD multiply_pair(const std::pair<LazyBlock, LazyBlock>& ab)
{
    return serial_multiply(ab.first.get(), ab.second.get());
}

MatrixD add(const MatrixD& x, const MatrixD& y) { return x + y; }

using EncodedBlocks = std::vector<std::pair<std::pair<std::int32_t, std::int32_t>, MatrixD>>;

}  // namespace

DistributedProduct generic_parallel_multiply(Context& ctx, std::uint64_t seed, int n, int q)
{
    require_cube_world(ctx, q);
    const BlockDecomposition dec(n, q);
    const int s = dec.block_side();
    std::uint64_t* counter = &ctx.counters().materializations;

    DistributedProduct out{dec, {}};
    std::vector<int> ranks(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            std::iota(ranks.begin(), ranks.end(), (i * q + j) * q);
            Communicator group = ctx.world().derive(ranks);
            auto a_row = DistSeq<LazyBlock>::generate(ctx, group, static_cast<std::size_t>(q),
                                                      [=](std::size_t k) {
                                                          return LazyBlock(
                                                              {seed, MatrixId::a, i, static_cast<int>(k), s},
                                                              counter);
                                                      });
            auto b_col = DistSeq<LazyBlock>::generate(ctx, group, static_cast<std::size_t>(q),
                                                      [=](std::size_t k) {
                                                          return LazyBlock(
                                                              {seed, MatrixId::b, static_cast<int>(k), j, s},
                                                              counter);
                                                      });
            auto c = zip(a_row, b_col).map(multiply_pair).reduce(add);
            if (c.has_value()) {
                out.blocks.emplace_back(BlockIndex{i, j}, *c.value());
            }
        }
    }
    return out;
}

DistributedProduct grid_parallel_multiply(Context& ctx, std::uint64_t seed, int n, int q)
{
    require_cube_world(ctx, q);
    const BlockDecomposition dec(n, q);
    const int s = dec.block_side();
    std::uint64_t* counter = &ctx.counters().materializations;

    const Grid3D grid(ctx, q);
    const auto [i, j, k] = grid.coords();
    auto a = grid.z_seq<LazyBlock>([=] { return LazyBlock({seed, MatrixId::a, i, k, s}, counter); });
    auto b = grid.z_seq<LazyBlock>([=] { return LazyBlock({seed, MatrixId::b, k, j, s}, counter); });
    auto c = zip(a, b).map(multiply_pair).reduce(add);

    DistributedProduct out{dec, {}};
    if (c.has_value()) {
        out.blocks.emplace_back(BlockIndex{i, j}, *c.value());
    }
    return out;
}

std::optional<MatrixD> gather_result(Context& ctx, const DistributedProduct& product)
{
    EncodedBlocks mine;
    mine.reserve(product.blocks.size());
    for (const auto& [index, block] : product.blocks) {
        mine.push_back({{index.row, index.col}, block});
    }
    auto all = gather(ctx.world(), 0, encode(mine));
    if (!all) {
        return std::nullopt;
    }

    const BlockDecomposition& dec = product.decomposition;
    const int q = dec.q();
    const int s = dec.block_side();
    MatrixD c = MatrixD::Zero(dec.n(), dec.n());
    std::vector<bool> seen(static_cast<std::size_t>(q * q), false);
    for (const Bytes& payload : *all) {
        for (const auto& [index, block] : decode<EncodedBlocks>(payload)) {
            const auto [row, col] = index;
            if (row < 0 || row >= q || col < 0 || col >= q) {
                throw AssemblyError("block (" + std::to_string(row) + "," + std::to_string(col) +
                                    ") outside a " + std::to_string(q) + "x" + std::to_string(q) +
                                    " decomposition");
            }
            if (block.rows() != s || block.cols() != s) {
                throw AssemblyError("block (" + std::to_string(row) + "," + std::to_string(col) +
                                    ") has the wrong shape");
            }
            const auto slot = static_cast<std::size_t>(row * q + col);
            if (seen[slot]) {
                throw AssemblyError("block (" + std::to_string(row) + "," + std::to_string(col) +
                                    ") delivered twice");
            }
            seen[slot] = true;
            c.block(row * s, col * s, s, s) = block;
        }
    }
    for (int r = 0; r < q; ++r) {
        for (int col = 0; col < q; ++col) {
            if (!seen[static_cast<std::size_t>(r * q + col)]) {
                throw AssemblyError("block (" + std::to_string(r) + "," + std::to_string(col) +
                                    ") missing");
            }
        }
    }
    return c;
}

}  // namespace spmd
