#pragma once

#include "spmd/transport/endpoint.hpp"
#include "spmd/transport/mailbox.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace spmd {

struct PeerAddress {
    std::string host;
    std::uint16_t port = 0;

    friend bool operator==(const PeerAddress&, const PeerAddress&) = default;
};

/// One `host:port` per line; line i is rank i. Trailing blank lines are ignored.
std::vector<PeerAddress> parse_peers(std::string_view text);
std::vector<PeerAddress> read_peers_file(const std::filesystem::path& path);

/// TCP endpoint: one OS process per rank, fully connected mesh.
///
/// Rank r listens on peers[r], connects to every lower rank and accepts every
/// higher one. A reader thread per connection moves incoming frames into the
/// mailbox. Destruction half-closes all connections and waits for every peer
/// to do the same, so it acts as a finalize barrier.
class SocketEndpoint final : public Endpoint {
public:
    SocketEndpoint(RankId rank, std::vector<PeerAddress> peers,
                   std::chrono::milliseconds connect_timeout = std::chrono::seconds(30));
    ~SocketEndpoint() override;

protected:
    void deliver(int dest, Tag tag, std::span<const std::byte> payload) override;
    Mailbox& inbox() override { return inbox_; }

private:
    struct Connection {
        int fd = -1;
        std::mutex write_mutex;
        std::thread reader;
    };

    void read_loop(int peer);

    std::vector<PeerAddress> peers_;
    Mailbox inbox_;
    int listener_ = -1;
    std::vector<std::unique_ptr<Connection>> connections_;
};

/// Reserves `count` free TCP ports on 127.0.0.1.
std::vector<PeerAddress> local_peers(int count);

/// Forks `size` processes, each running `program` on its own SocketEndpoint
/// over a fresh localhost peer list. Returns every child's exit status
/// (the program's return value, or 1 if it threw). Call only from a
/// single-threaded parent.
std::vector<int> launch_local(int size, const std::function<int(Endpoint&)>& program);

}  // namespace spmd
