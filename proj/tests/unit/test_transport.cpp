#include <doctest.h>

#include "spmd/errors.hpp"
#include "spmd/transport/communicator.hpp"
#include "spmd/transport/frame.hpp"
#include "spmd/transport/inproc.hpp"
#include "spmd/transport/socket.hpp"

#include <random>
#include <stdexcept>

using namespace spmd;

namespace {

Bytes bytes_of(std::initializer_list<int> values)
{
    Bytes out;
    for (int v : values) {
        out.push_back(static_cast<std::byte>(v));
    }
    return out;
}

Bytes random_bytes(std::mt19937& rng, std::size_t max_len)
{
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> byte(0, 255);
    Bytes out(len(rng));
    for (auto& b : out) {
        b = static_cast<std::byte>(byte(rng));
    }
    return out;
}

}  // namespace

TEST_CASE("send then recv delivers the payload")
{
    InProcWorld world(2);
    world.endpoint(RankId(0)).send(RankId(1), 7, bytes_of({1, 2, 3}));
    CHECK(world.endpoint(RankId(1)).recv(RankId(0), 7) == bytes_of({1, 2, 3}));

    const CommStats s = world.endpoint(RankId(0)).stats();
    CHECK(s.messages_sent == 1);
    CHECK(s.bytes_sent == 3);
    CHECK(world.endpoint(RankId(1)).stats().messages_sent == 0);
}

TEST_CASE("empty payloads are legal messages")
{
    InProcWorld world(2);
    world.endpoint(RankId(1)).send(RankId(0), 0, {});
    CHECK(world.endpoint(RankId(0)).recv(RankId(1), 0).empty());
    CHECK(world.endpoint(RankId(1)).stats().messages_sent == 1);
    CHECK(world.endpoint(RankId(1)).stats().bytes_sent == 0);
}

TEST_CASE("addressing outside the world or oneself is a topology error")
{
    InProcWorld world(3);
    Endpoint& ep = world.endpoint(RankId(0));
    CHECK_THROWS_AS(ep.send(RankId(3), 0, bytes_of({1})), TopologyError);
    CHECK_THROWS_AS(ep.send(RankId(0), 0, bytes_of({1})), TopologyError);
    CHECK_THROWS_AS(ep.recv(RankId(9), 0), TopologyError);
    CHECK(ep.stats().messages_sent == 0);
    CHECK_THROWS_AS(world.endpoint(RankId(3)), TopologyError);
    CHECK_THROWS_AS(InProcWorld(0), TopologyError);
}

TEST_CASE("messages on one (source, tag) pair arrive in send order")
{
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        InProcWorld world(2);
        std::vector<Bytes> sent;
        const int count = 1 + trial % 17;
        for (int i = 0; i < count; ++i) {
            sent.push_back(random_bytes(rng, 64));
            world.endpoint(RankId(0)).send(RankId(1), 5, sent.back());
        }
        for (int i = 0; i < count; ++i) {
            REQUIRE(world.endpoint(RankId(1)).recv(RankId(0), 5) == sent[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("receives match on tag, not arrival order")
{
    std::mt19937 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        InProcWorld world(2);
        std::vector<std::vector<Bytes>> by_tag(4);
        std::uniform_int_distribution<int> pick(0, 3);
        for (int i = 0; i < 40; ++i) {
            const int tag = pick(rng);
            by_tag[static_cast<std::size_t>(tag)].push_back(random_bytes(rng, 8));
            world.endpoint(RankId(0)).send(RankId(1), static_cast<Tag>(tag),
                                           by_tag[static_cast<std::size_t>(tag)].back());
        }
        for (int tag = 3; tag >= 0; --tag) {
            for (const Bytes& want : by_tag[static_cast<std::size_t>(tag)]) {
                REQUIRE(world.endpoint(RankId(1)).recv(RankId(0), static_cast<Tag>(tag)) == want);
            }
        }
    }
}

TEST_CASE("a receive on another tag never matches")
{
    InProcWorld world(2);
    world.endpoint(RankId(0)).send(RankId(1), 1, bytes_of({9}));
    CHECK_FALSE(world.endpoint(RankId(1)).recv_for(RankId(0), 2, std::chrono::milliseconds(50)));
    CHECK(world.endpoint(RankId(1)).recv_for(RankId(0), 1, std::chrono::milliseconds(50)) ==
          bytes_of({9}));
}

TEST_CASE("shutdown wakes blocked receivers and rejects sends")
{
    InProcWorld world(2);
    world.shutdown();
    CHECK_THROWS_AS(world.endpoint(RankId(1)).recv(RankId(0), 0), TransportError);
    CHECK_THROWS_AS(world.endpoint(RankId(0)).send(RankId(1), 0, bytes_of({1})), TransportError);
}

TEST_CASE("a failing rank aborts the run and its error surfaces")
{
    InProcWorld world(3);
    auto program = [](Endpoint& ep) {
        if (ep.rank().value == 2) {
            throw std::runtime_error("rank 2 failed");
        }
        // Would block forever without the shutdown.
        ep.recv(RankId(2), 0);
    };
    CHECK_THROWS_WITH_AS(world.run(program), "rank 2 failed", std::runtime_error);
}

TEST_CASE("world stats aggregate sums messages and takes the max of rounds")
{
    std::vector<CommStats> per_rank{{3, 30, 2, 1}, {1, 5, 4, 1}, {0, 0, 1, 1}};
    const CommStats total = aggregate(per_rank);
    CHECK(total.messages_sent == 4);
    CHECK(total.bytes_sent == 35);
    CHECK(total.rounds == 4);
    CHECK(total.collectives == 3);
    CHECK((CommStats{3, 30, 2, 1} - CommStats{1, 10, 1, 0}) == CommStats{2, 20, 1, 1});
}

TEST_CASE("derived groups relabel ranks locally")
{
    InProcWorld world(6);
    Communicator w(world.endpoint(RankId(4)));
    const std::vector<int> members{5, 4, 1};
    Communicator g = w.derive(members);
    CHECK(g.is_member());
    CHECK(g.size() == 3);
    CHECK(g.rank() == 1);
    CHECK(g.world_rank(0) == RankId(5));

    const std::vector<int> sub{0, 2};
    Communicator h = g.derive(sub);
    CHECK_FALSE(h.is_member());
    CHECK(h.world_rank(1) == RankId(1));
    CHECK_THROWS_AS(h.rank(), TopologyError);

    const std::vector<int> dup{1, 1};
    CHECK_THROWS_AS(w.derive(dup), TopologyError);
    const std::vector<int> out_of_range{6};
    CHECK_THROWS_AS(w.derive(out_of_range), TopologyError);
}

TEST_CASE("collective tags separate kinds, arguments and instances")
{
    InProcWorld world(4);
    Communicator a(world.endpoint(RankId(0)));
    Communicator b(world.endpoint(RankId(0)));
    const Tag first = a.next_tag(CollectiveKind::broadcast, 0);
    CHECK(first == b.next_tag(CollectiveKind::broadcast, 0));
    CHECK(a.next_tag(CollectiveKind::broadcast, 0) != first);
    CHECK(b.next_tag(CollectiveKind::broadcast, 1) != a.next_tag(CollectiveKind::broadcast, 0));
    CHECK((first & 0x80000000u) != 0);
}

TEST_CASE("frame header is big-endian length, tag, source")
{
    const auto raw = encode_header({0x01020304u, 0xa0b0c0d0u, 7});
    const std::array<int, 12> want{1, 2, 3, 4, 0xa0, 0xb0, 0xc0, 0xd0, 0, 0, 0, 7};
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(std::to_integer<int>(raw[i]) == want[i]);
    }

    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        const FrameHeader h{static_cast<std::uint32_t>(rng()), static_cast<Tag>(rng()),
                            static_cast<std::uint32_t>(rng())};
        REQUIRE(decode_header(encode_header(h)) == h);
    }
}

TEST_CASE("peers file: one host:port per line")
{
    const auto peers = parse_peers("127.0.0.1:5000\nnode-b:5001\r\n[::1]:6000\n\n");
    REQUIRE(peers.size() == 3);
    CHECK(peers[0] == PeerAddress{"127.0.0.1", 5000});
    CHECK(peers[1] == PeerAddress{"node-b", 5001});
    CHECK(peers[2] == PeerAddress{"[::1]", 6000});

    CHECK_THROWS_AS(parse_peers(""), TopologyError);
    CHECK_THROWS_AS(parse_peers("hostonly\n"), TopologyError);
    CHECK_THROWS_AS(parse_peers("h:0\n"), TopologyError);
    CHECK_THROWS_AS(parse_peers("h:70000\n"), TopologyError);
    CHECK_THROWS_AS(parse_peers("a:1\n\nb:2\n"), TopologyError);
    CHECK_THROWS_AS(read_peers_file("/nonexistent/peers.txt"), TopologyError);
}
