#pragma once

#include "spmd/core/context.hpp"
#include "spmd/core/dist_seq.hpp"
#include "spmd/transport/communicator.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace spmd {

/// Mixed-radix bijection between ranks and Cartesian coordinates; the last
/// axis varies fastest.
class CartesianTopology {
public:
    explicit CartesianTopology(std::vector<int> dims);

    const std::vector<int>& dims() const noexcept { return dims_; }
    int rank_count() const noexcept { return count_; }

    std::vector<int> coords_of(int rank) const;
    int rank_of(std::span<const int> coords) const;

    /// Ranks whose coordinates equal `coords` everywhere except along `axis`,
    /// ordered by their coordinate along `axis`.
    std::vector<int> axis_line(std::span<const int> coords, std::size_t axis) const;

private:
    std::vector<int> dims_;
    int count_ = 1;
};

/// Process grid of arbitrary rank over a world of prod(dims) processes.
class GridN {
public:
    GridN(Context& ctx, std::vector<int> dims);

    const CartesianTopology& topology() const noexcept { return topology_; }
    const std::vector<int>& coords() const noexcept { return coords_; }
    Context& context() const noexcept { return *ctx_; }

    /// Group of ranks sharing the caller's coordinates except along `axis`.
    Communicator axis_group(std::size_t axis) const;

    /// Sequence along `axis` through the caller: element t is owned by the
    /// rank at coordinate t, and the caller contributes `element`, evaluated
    /// lazily.
    template <typename T>
    DistSeq<T> axis_seq(std::size_t axis, std::function<T()> element) const
    {
        Communicator group = axis_group(axis);
        const auto length = static_cast<std::size_t>(topology_.dims()[axis]);
        return DistSeq<T>::generate(*ctx_, std::move(group), length,
                                    [element = std::move(element)](std::size_t) { return element(); });
    }

private:
    Context* ctx_;
    CartesianTopology topology_;
    std::vector<int> coords_;
};

struct Coord3 {
    int i = 0;
    int j = 0;
    int k = 0;

    friend bool operator==(const Coord3&, const Coord3&) = default;
};

/// q x q x q grid; rank = i*q^2 + j*q + k.
class Grid3D {
public:
    /// Throws TopologyError unless the world has exactly q^3 ranks.
    Grid3D(Context& ctx, int q);

    int side() const noexcept { return q_; }
    Coord3 coords() const noexcept { return coords_; }
    Context& context() const noexcept { return grid_.context(); }

    static Coord3 coords_of(int rank, int q);
    static int rank_of(Coord3 c, int q);

    Communicator x_group() const { return grid_.axis_group(0); }
    Communicator y_group() const { return grid_.axis_group(1); }
    Communicator z_group() const { return grid_.axis_group(2); }

    /// Varies in x, constant in the caller's (j, k).
    template <typename T>
    DistSeq<T> x_seq(std::function<T()> element) const
    {
        return grid_.axis_seq<T>(0, std::move(element));
    }

    /// Varies in y, constant in the caller's (i, k).
    template <typename T>
    DistSeq<T> y_seq(std::function<T()> element) const
    {
        return grid_.axis_seq<T>(1, std::move(element));
    }

    /// Varies in z, constant in the caller's (i, j). Group rank 0 is (i, j, 0),
    /// so reductions along z land on the k = 0 plane.
    template <typename T>
    DistSeq<T> z_seq(std::function<T()> element) const
    {
        return grid_.axis_seq<T>(2, std::move(element));
    }

private:
    int q_;
    GridN grid_;
    Coord3 coords_;
};

}  // namespace spmd
