#include "collective_suite.hpp"

#include "world.hpp"

#include "spmd/core/codec.hpp"
#include "spmd/transport/collectives.hpp"
#include "spmd/transport/communicator.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace spmd::testing {

namespace {

// Deterministic local payload of group rank r: r + 1 words.
std::vector<double> local_words(int r)
{
    std::vector<double> out(static_cast<std::size_t>(r + 1));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = r * 100.0 + static_cast<double>(i);
    }
    return out;
}

std::vector<double> root_words()
{
    std::vector<double> out(16);
    std::iota(out.begin(), out.end(), 0.5);
    return out;
}

OpRecord measure(const char* op, int g, Endpoint& ep, const CommStats& before, Bytes result)
{
    const CommStats d = ep.stats() - before;
    return {op, g, d.messages_sent, d.bytes_sent, d.rounds, std::move(result)};
}

}  // namespace

std::vector<OpRecord> run_collective_suite(Endpoint& ep, std::span<const int> group_sizes)
{
    Communicator world(ep);
    std::vector<OpRecord> records;
    for (int g : group_sizes) {
        std::vector<int> ranks(static_cast<std::size_t>(g));
        std::iota(ranks.begin(), ranks.end(), 0);
        Communicator group = world.derive(ranks);
        if (!group.is_member()) {
            continue;
        }
        const int r = group.rank();

        auto before = ep.stats();
        Bytes payload = r == 0 ? encode(root_words()) : Bytes{};
        records.push_back(measure("broadcast", g, ep, before, broadcast(group, 0, std::move(payload))));

        before = ep.stats();
        const ByteCombine add = [](const Bytes& a, const Bytes& b) {
            return encode(decode<std::int64_t>(a) + decode<std::int64_t>(b));
        };
        auto reduced = reduce(group, 0, encode<std::int64_t>(r), add);
        records.push_back(measure("reduce", g, ep, before, reduced.value_or(Bytes{})));

        before = ep.stats();
        auto gathered = all_gather(group, encode(local_words(r)));
        Bytes flat;
        for (const auto& b : gathered) {
            flat.insert(flat.end(), b.begin(), b.end());
        }
        records.push_back(measure("all_gather", g, ep, before, std::move(flat)));

        before = ep.stats();
        records.push_back(
            measure("circular_shift", g, ep, before, circular_shift(group, 1, encode(local_words(r)))));
    }
    return records;
}

std::vector<std::string> check_collective_suite(int world_size, std::span<const int> group_sizes,
                                                const std::vector<std::vector<OpRecord>>& per_rank)
{
    std::vector<std::string> failures;
    auto fail = [&](int g, const std::string& op, const std::string& what) {
        std::ostringstream s;
        s << op << " p=" << g << ": " << what;
        failures.push_back(s.str());
    };

    for (int g : group_sizes) {
        if (g > world_size) {
            fail(g, "suite", "group larger than world");
            continue;
        }
        // op -> per-group-rank record
        std::map<std::string, std::vector<const OpRecord*>> by_op;
        for (int r = 0; r < g; ++r) {
            for (const auto& rec : per_rank[static_cast<std::size_t>(r)]) {
                if (rec.group_size == g) {
                    by_op[rec.op].push_back(&rec);
                }
            }
        }
        bool complete = true;
        for (const char* op : {"broadcast", "reduce", "all_gather", "circular_shift"}) {
            if (by_op[op].size() != static_cast<std::size_t>(g)) {
                fail(g, op, "missing records");
                complete = false;
            }
        }
        if (!complete) {
            continue;
        }
        auto totals = [&](const std::string& op) {
            std::uint64_t messages = 0;
            std::uint64_t rounds = 0;
            for (const auto* rec : by_op[op]) {
                messages += rec->messages;
                rounds = std::max(rounds, rec->rounds);
            }
            return std::pair(messages, rounds);
        };
        const auto ug = static_cast<std::uint64_t>(g);
        const auto lg = static_cast<std::uint64_t>(ceil_log2(g));
        auto expect_counts = [&](const std::string& op, std::uint64_t messages, std::uint64_t rounds) {
            const auto [m, r] = totals(op);
            if (m != messages) {
                fail(g, op, "messages " + std::to_string(m) + " != " + std::to_string(messages));
            }
            if (r != rounds) {
                fail(g, op, "rounds " + std::to_string(r) + " != " + std::to_string(rounds));
            }
        };
        expect_counts("broadcast", ug - 1, lg);
        expect_counts("reduce", ug - 1, lg);
        expect_counts("all_gather", ug * (ug - 1), ug - 1);
        expect_counts("circular_shift", g == 1 ? 0 : ug, g == 1 ? 0 : 1);

        const Bytes root = encode(root_words());
        for (int r = 0; r < g; ++r) {
            const auto idx = static_cast<std::size_t>(r);
            if (by_op["broadcast"][idx]->result != root) {
                fail(g, "broadcast", "rank " + std::to_string(r) + " holds a different payload");
            }
            const Bytes want_reduce =
                r == 0 ? encode<std::int64_t>(static_cast<std::int64_t>(g) * (g - 1) / 2) : Bytes{};
            if (by_op["reduce"][idx]->result != want_reduce) {
                fail(g, "reduce", "rank " + std::to_string(r) + " result differs from the left fold");
            }
            Bytes want_gather;
            for (int s = 0; s < g; ++s) {
                const Bytes b = encode(local_words(s));
                want_gather.insert(want_gather.end(), b.begin(), b.end());
            }
            if (by_op["all_gather"][idx]->result != want_gather) {
                fail(g, "all_gather", "rank " + std::to_string(r) + " list differs");
            }
            if (by_op["all_gather"][idx]->messages != ug - 1) {
                fail(g, "all_gather", "rank " + std::to_string(r) + " did not send p-1 messages");
            }
            if (by_op["circular_shift"][idx]->result != encode(local_words((r - 1 + g) % g))) {
                fail(g, "circular_shift", "rank " + std::to_string(r) + " got the wrong neighbour");
            }
        }
    }
    return failures;
}

Bytes encode_records(const std::vector<OpRecord>& records)
{
    Bytes out;
    Codec<std::uint64_t>::encode(records.size(), out);
    for (const auto& r : records) {
        Codec<std::string>::encode(r.op, out);
        Codec<std::int32_t>::encode(r.group_size, out);
        Codec<std::uint64_t>::encode(r.messages, out);
        Codec<std::uint64_t>::encode(r.bytes, out);
        Codec<std::uint64_t>::encode(r.rounds, out);
        Codec<std::vector<std::byte>>::encode(r.result, out);
    }
    return out;
}

std::vector<OpRecord> decode_records(std::span<const std::byte> bytes)
{
    ByteReader in(bytes);
    std::vector<OpRecord> out(static_cast<std::size_t>(Codec<std::uint64_t>::decode(in)));
    for (auto& r : out) {
        r.op = Codec<std::string>::decode(in);
        r.group_size = Codec<std::int32_t>::decode(in);
        r.messages = Codec<std::uint64_t>::decode(in);
        r.bytes = Codec<std::uint64_t>::decode(in);
        r.rounds = Codec<std::uint64_t>::decode(in);
        r.result = Codec<std::vector<std::byte>>::decode(in);
    }
    return out;
}

}  // namespace spmd::testing
