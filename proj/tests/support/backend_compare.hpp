#pragma once

#include "spmd/transport/endpoint.hpp"

#include <span>
#include <string>
#include <vector>

namespace spmd::testing {

/// Everything one rank observes in the backend comparison program: the
/// collective suite records, then per algorithm (generic, grid) the rank's
/// CommStats delta and, on rank 0, the encoded assembled C. q = 2, n = 4.
struct RankTrace {
    Bytes suite;
    std::vector<Bytes> matmul;

    friend bool operator==(const RankTrace&, const RankTrace&) = default;
};

RankTrace trace_rank(Endpoint& ep, std::span<const int> group_sizes);

Bytes encode_trace(const RankTrace& trace);
RankTrace decode_trace(std::span<const std::byte> bytes);

/// Runs the program on an 8-rank in-process world.
std::vector<RankTrace> inproc_traces(std::span<const int> group_sizes);

/// Runs the program in 8 forked processes over localhost TCP. Throws
/// TransportError if any child fails.
std::vector<RankTrace> socket_traces(std::span<const int> group_sizes);

/// Runs both backends; returns a line per difference or failed expectation.
std::vector<std::string> compare_backends(std::span<const int> group_sizes);

}  // namespace spmd::testing
