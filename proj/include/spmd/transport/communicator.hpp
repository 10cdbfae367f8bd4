#pragma once

#include "spmd/transport/endpoint.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace spmd {

enum class CollectiveKind : std::uint8_t {
    broadcast = 1,
    reduce = 2,
    all_gather = 3,
    shift = 4,
    gather = 5,
};

/// An ordered group of ranks over one endpoint, with group-local numbering.
///
/// Copies share state (including the collective sequence counter). Every
/// rank of the world may hold a communicator for any group; on ranks that are
/// not members, `is_member()` is false and collectives must not be called.
class Communicator {
public:
    /// The whole world of `endpoint`, in rank order.
    explicit Communicator(Endpoint& endpoint);

    /// Sub-group given by local ranks of this communicator, in the order
    /// listed. Pure local computation; no messages.
    Communicator derive(std::span<const int> local_ranks) const;

    bool is_member() const noexcept { return state_->local >= 0; }

    /// Group-local rank of the caller. Throws TopologyError for non-members.
    int rank() const;
    int size() const noexcept { return static_cast<int>(state_->members.size()); }

    RankId world_rank(int local) const;
    std::span<const int> members() const noexcept { return state_->members; }

    Endpoint& endpoint() const noexcept { return *endpoint_; }

    /// Tag for the next collective on this group. Mixes the operation kind,
    /// its rank-agreed argument (root, offset) and a per-group instance
    /// counter, so ranks that disagree on any of them wait on different tags.
    Tag next_tag(CollectiveKind kind, std::uint32_t argument);

private:
    struct State {
        std::vector<int> members;
        int local = -1;
        std::uint32_t fingerprint = 0;
        std::uint32_t sequence = 0;
    };

    Communicator(Endpoint& endpoint, std::shared_ptr<State> state);

    Endpoint* endpoint_;
    std::shared_ptr<State> state_;
};

}  // namespace spmd
