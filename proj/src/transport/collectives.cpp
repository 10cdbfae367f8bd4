#include "spmd/transport/collectives.hpp"

#include "spmd/errors.hpp"

#include <string>

namespace spmd {

namespace {

void check_root(const Communicator& comm, int root, const char* what)
{
    if (root < 0 || root >= comm.size()) {
        throw TopologyError(std::string(what) + ": root " + std::to_string(root) +
                            " outside group of size " + std::to_string(comm.size()));
    }
}

int mod(int a, int p) { return ((a % p) + p) % p; }

}  // namespace

Bytes broadcast(Communicator& comm, int root, Bytes payload)
{
    check_root(comm, root, "broadcast");
    const int p = comm.size();
    const int me = comm.rank();
    const Tag tag = comm.next_tag(CollectiveKind::broadcast, static_cast<std::uint32_t>(root));
    Endpoint& ep = comm.endpoint();

    // Relative rank: the root is 0. In the step with stride `mask`, ranks
    // [0, mask) already hold the payload and forward it to rank + mask.
    const int rel = mod(me - root, p);
    std::uint64_t steps = 0;
    for (int mask = 1; mask < p; mask <<= 1) {
        if (rel < mask) {
            if (rel + mask < p) {
                ep.send(comm.world_rank(mod(rel + mask + root, p)), tag, payload);
                ++steps;
            }
        } else if (rel < 2 * mask) {
            payload = ep.recv(comm.world_rank(mod(rel - mask + root, p)), tag);
            ++steps;
        }
    }
    ep.record_collective(steps);
    return payload;
}

std::optional<Bytes> reduce(Communicator& comm, int root, Bytes local, const ByteCombine& combine)
{
    check_root(comm, root, "reduce");
    const int p = comm.size();
    const int me = comm.rank();
    const Tag tag = comm.next_tag(CollectiveKind::reduce, static_cast<std::uint32_t>(root));
    Endpoint& ep = comm.endpoint();

    // Mirror of broadcast. After the step with stride `mask`, relative rank r
    // (a multiple of 2*mask) holds the fold of [r, r + 2*mask).
    const int rel = mod(me - root, p);
    std::uint64_t steps = 0;
    bool sent = false;
    for (int mask = 1; mask < p; mask <<= 1) {
        if (rel & mask) {
            ep.send(comm.world_rank(mod(rel - mask + root, p)), tag, local);
            ++steps;
            sent = true;
            break;
        }
        if (rel + mask < p) {
            Bytes right = ep.recv(comm.world_rank(mod(rel + mask + root, p)), tag);
            local = combine(local, right);
            ++steps;
        }
    }
    ep.record_collective(steps);
    if (sent || rel != 0) {
        return std::nullopt;
    }
    return local;
}

std::vector<Bytes> all_gather(Communicator& comm, Bytes local)
{
    const int p = comm.size();
    const int me = comm.rank();
    const Tag tag = comm.next_tag(CollectiveKind::all_gather, 0);
    Endpoint& ep = comm.endpoint();

    std::vector<Bytes> result(static_cast<std::size_t>(p));
    result[static_cast<std::size_t>(me)] = std::move(local);
    if (p == 1) {
        ep.record_collective(0);
        return result;
    }
    const RankId next = comm.world_rank(mod(me + 1, p));
    const RankId prev = comm.world_rank(mod(me - 1, p));
    // Step s forwards the element that originated s hops upstream.
    for (int step = 0; step < p - 1; ++step) {
        ep.send(next, tag, result[static_cast<std::size_t>(mod(me - step, p))]);
        result[static_cast<std::size_t>(mod(me - step - 1, p))] = ep.recv(prev, tag);
    }
    ep.record_collective(static_cast<std::uint64_t>(p - 1));
    return result;
}

Bytes circular_shift(Communicator& comm, int offset, Bytes local)
{
    const int p = comm.size();
    const int me = comm.rank();
    const int shift = mod(offset, p);
    const Tag tag = comm.next_tag(CollectiveKind::shift, static_cast<std::uint32_t>(shift));
    Endpoint& ep = comm.endpoint();
    if (shift == 0) {
        ep.record_collective(0);
        return local;
    }
    ep.send(comm.world_rank(mod(me + shift, p)), tag, local);
    Bytes incoming = ep.recv(comm.world_rank(mod(me - shift, p)), tag);
    ep.record_collective(1);
    return incoming;
}

std::optional<std::vector<Bytes>> gather(Communicator& comm, int root, Bytes local)
{
    check_root(comm, root, "gather");
    const int p = comm.size();
    const int me = comm.rank();
    const Tag tag = comm.next_tag(CollectiveKind::gather, static_cast<std::uint32_t>(root));
    Endpoint& ep = comm.endpoint();
    if (me != root) {
        ep.send(comm.world_rank(root), tag, local);
        ep.record_collective(1);
        return std::nullopt;
    }
    std::vector<Bytes> result(static_cast<std::size_t>(p));
    result[static_cast<std::size_t>(me)] = std::move(local);
    for (int r = 0; r < p; ++r) {
        if (r != root) {
            result[static_cast<std::size_t>(r)] = ep.recv(comm.world_rank(r), tag);
        }
    }
    ep.record_collective(static_cast<std::uint64_t>(p - 1));
    return result;
}

}  // namespace spmd
