#pragma once

#include "spmd/core/context.hpp"
#include "spmd/transport/endpoint.hpp"
#include "spmd/transport/inproc.hpp"

#include <functional>
#include <vector>

namespace spmd::testing {

struct WorldRun {
    std::vector<CommStats> stats;
    std::vector<WorkCounters> counters;

    CommStats total() const { return aggregate(stats); }
};

/// Runs `program` on every rank of a fresh in-process world of size p.
inline WorldRun run_world(int p, const std::function<void(Context&)>& program)
{
    InProcWorld world(p);
    std::vector<WorkCounters> counters(static_cast<std::size_t>(p));
    world.run([&](Endpoint& ep) {
        Context ctx(ep);
        program(ctx);
        counters[ep.rank().value] = ctx.counters();
    });
    return {world.stats(), std::move(counters)};
}

inline int ceil_log2(int p)
{
    int r = 0;
    while ((1 << r) < p) {
        ++r;
    }
    return r;
}

}  // namespace spmd::testing
