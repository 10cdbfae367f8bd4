#pragma once

#include "spmd/transport/communicator.hpp"
#include "spmd/transport/endpoint.hpp"

#include <cstdint>

namespace spmd {

/// Per-rank work counters, used to check that work lands where the
/// process-data mapping says it should.
struct WorkCounters {
    /// Element transformations executed by mapD on this rank.
    std::uint64_t element_ops = 0;
    /// Communicating sequence operations reached by this rank's program,
    /// whether it was a group member or executed a nop.
    std::uint64_t collective_calls = 0;
    /// Lazy matrix blocks materialized on this rank.
    std::uint64_t materializations = 0;

    friend bool operator==(const WorkCounters&, const WorkCounters&) = default;
};

/// Identity of one SPMD process: its endpoint, the world group, and counters.
class Context {
public:
    explicit Context(Endpoint& endpoint) : world_(endpoint) {}

    Context(const Context&) = delete;
    Context& operator=(const Context&) = delete;

    int rank() const noexcept { return static_cast<int>(world_.endpoint().rank().value); }
    int size() const noexcept { return world_.size(); }

    Communicator& world() noexcept { return world_; }
    Endpoint& endpoint() const noexcept { return world_.endpoint(); }

    WorkCounters& counters() noexcept { return counters_; }
    const WorkCounters& counters() const noexcept { return counters_; }

private:
    Communicator world_;
    WorkCounters counters_;
};

}  // namespace spmd
