#include "spmd/transport/endpoint.hpp"

#include "spmd/errors.hpp"
#include "spmd/transport/mailbox.hpp"

#include <algorithm>
#include <string>

namespace spmd {

CommStats operator-(const CommStats& after, const CommStats& before)
{
    return {after.messages_sent - before.messages_sent, after.bytes_sent - before.bytes_sent,
            after.rounds - before.rounds, after.collectives - before.collectives};
}

CommStats aggregate(std::span<const CommStats> per_rank)
{
    CommStats total;
    for (const auto& s : per_rank) {
        total.messages_sent += s.messages_sent;
        total.bytes_sent += s.bytes_sent;
        total.collectives += s.collectives;
        total.rounds = std::max(total.rounds, s.rounds);
    }
    return total;
}

Endpoint::Endpoint(RankId rank, int size) : rank_(rank), size_(size)
{
    if (size < 1) {
        throw TopologyError("world size must be at least 1, got " + std::to_string(size));
    }
    if (rank.value >= static_cast<std::uint32_t>(size)) {
        throw TopologyError("rank " + std::to_string(rank.value) + " outside world of size " +
                            std::to_string(size));
    }
}

void Endpoint::check_peer(RankId peer, const char* what) const
{
    if (peer.value >= static_cast<std::uint32_t>(size_)) {
        throw TopologyError(std::string(what) + ": rank " + std::to_string(peer.value) +
                            " outside world of size " + std::to_string(size_));
    }
    if (peer == rank_) {
        throw TopologyError(std::string(what) + ": rank " + std::to_string(peer.value) +
                            " addressed itself");
    }
}

void Endpoint::send(RankId dest, Tag tag, std::span<const std::byte> payload)
{
    check_peer(dest, "send");
    deliver(static_cast<int>(dest.value), tag, payload);
    ++stats_.messages_sent;
    stats_.bytes_sent += payload.size();
}

Bytes Endpoint::recv(RankId source, Tag tag)
{
    check_peer(source, "recv");
    return *inbox().pop(static_cast<int>(source.value), tag, std::nullopt);
}

std::optional<Bytes> Endpoint::recv_for(RankId source, Tag tag, std::chrono::milliseconds timeout)
{
    check_peer(source, "recv");
    return inbox().pop(static_cast<int>(source.value), tag, Mailbox::Clock::now() + timeout);
}

void Endpoint::record_collective(std::uint64_t active_steps) noexcept
{
    stats_.rounds += active_steps;
    ++stats_.collectives;
}

}  // namespace spmd
