#pragma once

#include "spmd/transport/endpoint.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace spmd {

/// A transport world whose p ranks live in the calling process.
///
/// Each rank gets its own mailbox; `run` drives one thread per rank. If any
/// rank throws, the world is shut down (unblocking the others with a
/// TransportError) and the first exception is rethrown after all threads join.
class InProcWorld {
public:
    explicit InProcWorld(int size);
    ~InProcWorld();

    InProcWorld(const InProcWorld&) = delete;
    InProcWorld& operator=(const InProcWorld&) = delete;

    int size() const noexcept;
    Endpoint& endpoint(RankId rank);

    void run(const std::function<void(Endpoint&)>& program);

    /// Closes every mailbox. Blocked and future receives fail; sends fail.
    void shutdown();

    std::vector<CommStats> stats() const;

private:
    class RankEndpoint;
    struct Shared;

    std::shared_ptr<Shared> shared_;
    std::vector<std::unique_ptr<RankEndpoint>> endpoints_;
};

}  // namespace spmd
