#include "spmd/transport/communicator.hpp"

#include "spmd/errors.hpp"

#include <algorithm>
#include <string>

namespace spmd {

namespace {

// FNV-1a over the member list, folded to 11 bits.
std::uint32_t fingerprint_of(std::span<const int> members)
{
    std::uint32_t h = 2166136261u;
    for (int m : members) {
        h ^= static_cast<std::uint32_t>(m);
        h *= 16777619u;
    }
    return (h ^ (h >> 11) ^ (h >> 22)) & 0x7ffu;
}

}  // namespace

Communicator::Communicator(Endpoint& endpoint) : endpoint_(&endpoint)
{
    auto state = std::make_shared<State>();
    state->members.resize(static_cast<std::size_t>(endpoint.size()));
    for (int r = 0; r < endpoint.size(); ++r) {
        state->members[static_cast<std::size_t>(r)] = r;
    }
    state->local = static_cast<int>(endpoint.rank().value);
    state->fingerprint = fingerprint_of(state->members);
    state_ = std::move(state);
}

Communicator::Communicator(Endpoint& endpoint, std::shared_ptr<State> state)
    : endpoint_(&endpoint), state_(std::move(state))
{
}

Communicator Communicator::derive(std::span<const int> local_ranks) const
{
    auto state = std::make_shared<State>();
    state->members.reserve(local_ranks.size());
    const int me = static_cast<int>(endpoint_->rank().value);
    for (int local : local_ranks) {
        if (local < 0 || local >= size()) {
            throw TopologyError("derive: rank " + std::to_string(local) + " outside group of size " +
                                std::to_string(size()));
        }
        const int world = state_->members[static_cast<std::size_t>(local)];
        if (std::find(state->members.begin(), state->members.end(), world) != state->members.end()) {
            throw TopologyError("derive: rank " + std::to_string(local) + " listed twice");
        }
        if (world == me) {
            state->local = static_cast<int>(state->members.size());
        }
        state->members.push_back(world);
    }
    state->fingerprint = fingerprint_of(state->members);
    return Communicator(*endpoint_, std::move(state));
}

int Communicator::rank() const
{
    if (!is_member()) {
        throw TopologyError("rank " + std::to_string(endpoint_->rank().value) +
                            " is not a member of this group");
    }
    return state_->local;
}

RankId Communicator::world_rank(int local) const
{
    if (local < 0 || local >= size()) {
        throw TopologyError("group rank " + std::to_string(local) + " outside group of size " +
                            std::to_string(size()));
    }
    return RankId(static_cast<std::uint32_t>(state_->members[static_cast<std::size_t>(local)]));
}

Tag Communicator::next_tag(CollectiveKind kind, std::uint32_t argument)
{
    // bit 31: collective | bits 28-30: kind | bits 16-27: group and argument | bits 0-15: instance
    const std::uint32_t mixed = (state_->fingerprint ^ (argument * 0x9e3779b1u >> 20)) & 0xfffu;
    const std::uint32_t instance = state_->sequence++ & 0xffffu;
    return 0x80000000u | (static_cast<std::uint32_t>(kind) & 0x7u) << 28 | mixed << 16 | instance;
}

}  // namespace spmd
