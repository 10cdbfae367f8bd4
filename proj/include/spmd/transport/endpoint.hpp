#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spmd {

/// Rank of a process inside its transport world, in [0, p).
struct RankId {
    std::uint32_t value = 0;

    constexpr RankId() = default;
    constexpr explicit RankId(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(RankId, RankId) = default;
};

using Tag = std::uint32_t;
using Bytes = std::vector<std::byte>;

/// Per-rank communication counters.
///
/// `rounds` accumulates, for every collective this rank took part in, the number
/// of schedule steps in which the rank sent or received. Aggregating a world
/// takes the sum of messages and bytes but the maximum of rounds, so the
/// aggregate of a single collective is its critical-path length.
struct CommStats {
    std::uint64_t messages_sent = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t rounds = 0;
    std::uint64_t collectives = 0;

    friend bool operator==(const CommStats&, const CommStats&) = default;
};

/// Counter-wise difference `after - before` of two snapshots of one rank.
CommStats operator-(const CommStats& after, const CommStats& before);

/// World totals: summed messages/bytes/collectives, maximum rounds.
CommStats aggregate(std::span<const CommStats> per_rank);

class Mailbox;

/// One rank's attachment to a transport world.
///
/// Delivery is exactly-once and FIFO per (source, dest, tag). Receives match on
/// (source, tag) only, so messages with other tags never satisfy a receive.
/// An endpoint belongs to a single execution context; distinct endpoints of a
/// world may be driven concurrently.
class Endpoint {
public:
    Endpoint(const Endpoint&) = delete;
    Endpoint& operator=(const Endpoint&) = delete;
    virtual ~Endpoint() = default;

    RankId rank() const noexcept { return rank_; }
    int size() const noexcept { return size_; }

    void send(RankId dest, Tag tag, std::span<const std::byte> payload);

    /// Blocks until a message from `source` with `tag` arrives.
    Bytes recv(RankId source, Tag tag);

    /// Like recv, but gives up after `timeout` and returns nullopt.
    std::optional<Bytes> recv_for(RankId source, Tag tag, std::chrono::milliseconds timeout);

    const CommStats& stats() const noexcept { return stats_; }

    /// Called by collectives once per invocation with the number of steps this rank was active in.
    void record_collective(std::uint64_t active_steps) noexcept;

protected:
    Endpoint(RankId rank, int size);

    virtual void deliver(int dest, Tag tag, std::span<const std::byte> payload) = 0;
    virtual Mailbox& inbox() = 0;

private:
    void check_peer(RankId peer, const char* what) const;

    RankId rank_;
    int size_;
    CommStats stats_;
};

}  // namespace spmd
