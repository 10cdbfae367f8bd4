#pragma once

#include "spmd/transport/communicator.hpp"
#include "spmd/transport/endpoint.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace spmd {

/// Associative combination of two encoded values, left operand first.
using ByteCombine = std::function<Bytes(const Bytes&, const Bytes&)>;

// All collectives below must be called by every member of `comm`, in the same
// order, with identical root/offset arguments. Ranks are group-local.

/// Binomial-tree (recursive doubling) one-to-all broadcast. The root's
/// payload is returned everywhere; non-roots pass an empty payload.
/// p - 1 messages, ceil(log2 p) rounds.
Bytes broadcast(Communicator& comm, int root, Bytes payload);

/// Binomial-tree all-to-one reduction. The root gets the fold of all locals in
/// group order starting at the root (plain index order when root == 0);
/// everyone else gets nullopt. p - 1 messages, ceil(log2 p) rounds.
std::optional<Bytes> reduce(Communicator& comm, int root, Bytes local, const ByteCombine& combine);

/// Ring all-gather: element i of the result is rank i's local payload.
/// p - 1 rounds, p - 1 messages per rank.
std::vector<Bytes> all_gather(Communicator& comm, Bytes local);

/// Rank r receives the payload of rank (r - offset) mod p. One message per
/// rank unless offset is a multiple of p, in which case nothing is sent.
Bytes circular_shift(Communicator& comm, int offset, Bytes local);

/// Linear gather to `root`: one message from every other rank.
std::optional<std::vector<Bytes>> gather(Communicator& comm, int root, Bytes local);

}  // namespace spmd
