#include "spmd/grid/grid.hpp"

#include "spmd/errors.hpp"

#include <string>

namespace spmd {

CartesianTopology::CartesianTopology(std::vector<int> dims) : dims_(std::move(dims))
{
    if (dims_.empty()) {
        throw TopologyError("grid needs at least one axis");
    }
    for (int d : dims_) {
        if (d < 1) {
            throw TopologyError("grid extent must be positive, got " + std::to_string(d));
        }
        count_ *= d;
    }
}

std::vector<int> CartesianTopology::coords_of(int rank) const
{
    if (rank < 0 || rank >= count_) {
        throw TopologyError("rank " + std::to_string(rank) + " outside grid of " +
                            std::to_string(count_));
    }
    std::vector<int> coords(dims_.size());
    for (std::size_t a = dims_.size(); a-- > 0;) {
        coords[a] = rank % dims_[a];
        rank /= dims_[a];
    }
    return coords;
}

int CartesianTopology::rank_of(std::span<const int> coords) const
{
    if (coords.size() != dims_.size()) {
        throw TopologyError("expected " + std::to_string(dims_.size()) + " coordinates, got " +
                            std::to_string(coords.size()));
    }
    int rank = 0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        if (coords[a] < 0 || coords[a] >= dims_[a]) {
            throw TopologyError("coordinate " + std::to_string(coords[a]) + " outside axis " +
                                std::to_string(a) + " of extent " + std::to_string(dims_[a]));
        }
        rank = rank * dims_[a] + coords[a];
    }
    return rank;
}

std::vector<int> CartesianTopology::axis_line(std::span<const int> coords, std::size_t axis) const
{
    if (axis >= dims_.size()) {
        throw TopologyError("axis " + std::to_string(axis) + " outside grid of rank " +
                            std::to_string(dims_.size()));
    }
    std::vector<int> probe(coords.begin(), coords.end());
    std::vector<int> line;
    line.reserve(static_cast<std::size_t>(dims_[axis]));
    for (int t = 0; t < dims_[axis]; ++t) {
        probe[axis] = t;
        line.push_back(rank_of(probe));
    }
    return line;
}

GridN::GridN(Context& ctx, std::vector<int> dims) : ctx_(&ctx), topology_(std::move(dims))
{
    if (topology_.rank_count() != ctx.size()) {
        throw TopologyError("grid of " + std::to_string(topology_.rank_count()) +
                            " ranks over a world of " + std::to_string(ctx.size()));
    }
    coords_ = topology_.coords_of(ctx.rank());
}

Communicator GridN::axis_group(std::size_t axis) const
{
    return ctx_->world().derive(topology_.axis_line(coords_, axis));
}

namespace {

std::vector<int> cube_dims(int q)
{
    if (q < 1) {
        throw TopologyError("grid side must be positive, got " + std::to_string(q));
    }
    return {q, q, q};
}

}  // namespace

Grid3D::Grid3D(Context& ctx, int q) : q_(q), grid_(ctx, cube_dims(q))
{
    const auto& c = grid_.coords();
    coords_ = {c[0], c[1], c[2]};
}

Coord3 Grid3D::coords_of(int rank, int q)
{
    const auto c = CartesianTopology(cube_dims(q)).coords_of(rank);
    return {c[0], c[1], c[2]};
}

int Grid3D::rank_of(Coord3 c, int q)
{
    const std::array<int, 3> coords{c.i, c.j, c.k};
    return CartesianTopology(cube_dims(q)).rank_of(coords);
}

}  // namespace spmd
