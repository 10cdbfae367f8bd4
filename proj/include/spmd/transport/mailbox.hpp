#pragma once

#include "spmd/transport/endpoint.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace spmd {

/// Receive-side message store of one rank, keyed by (source, tag).
class Mailbox {
public:
    using Clock = std::chrono::steady_clock;

    explicit Mailbox(int world_size);

    void push(int source, Tag tag, Bytes payload);

    /// Pops the oldest message from (source, tag). Returns nullopt when the
    /// deadline passes; throws TransportError once the mailbox is closed or the
    /// source has disconnected with nothing left queued.
    std::optional<Bytes> pop(int source, Tag tag, std::optional<Clock::time_point> deadline);

    void close_source(int source);
    void close();

private:
    std::mutex mutex_;
    std::condition_variable arrived_;
    std::map<std::pair<int, Tag>, std::deque<Bytes>> queues_;
    std::vector<bool> source_closed_;
    bool closed_ = false;
};

}  // namespace spmd
