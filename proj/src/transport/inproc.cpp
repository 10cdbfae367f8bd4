#include "spmd/transport/inproc.hpp"

#include "spmd/errors.hpp"
#include "spmd/transport/mailbox.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace spmd {

struct InProcWorld::Shared {
    explicit Shared(int size)
    {
        mailboxes.reserve(static_cast<std::size_t>(size));
        for (int r = 0; r < size; ++r) {
            mailboxes.push_back(std::make_unique<Mailbox>(size));
        }
    }

    std::vector<std::unique_ptr<Mailbox>> mailboxes;
    std::atomic<bool> down{false};
};

class InProcWorld::RankEndpoint final : public Endpoint {
public:
    RankEndpoint(RankId rank, int size, std::shared_ptr<Shared> shared)
        : Endpoint(rank, size), shared_(std::move(shared))
    {
    }

protected:
    void deliver(int dest, Tag tag, std::span<const std::byte> payload) override
    {
        if (shared_->down.load()) {
            throw TransportError("send on a shut down world");
        }
        shared_->mailboxes[static_cast<std::size_t>(dest)]->push(
            static_cast<int>(rank().value), tag, Bytes(payload.begin(), payload.end()));
    }

    Mailbox& inbox() override { return *shared_->mailboxes[rank().value]; }

private:
    std::shared_ptr<Shared> shared_;
};

InProcWorld::InProcWorld(int size)
{
    if (size < 1) {
        throw TopologyError("world size must be at least 1");
    }
    shared_ = std::make_shared<Shared>(size);
    endpoints_.reserve(static_cast<std::size_t>(size));
    for (int r = 0; r < size; ++r) {
        endpoints_.push_back(
            std::make_unique<RankEndpoint>(RankId(static_cast<std::uint32_t>(r)), size, shared_));
    }
}

InProcWorld::~InProcWorld() = default;

int InProcWorld::size() const noexcept { return static_cast<int>(endpoints_.size()); }

Endpoint& InProcWorld::endpoint(RankId rank)
{
    if (rank.value >= endpoints_.size()) {
        throw TopologyError("rank outside in-process world");
    }
    return *endpoints_[rank.value];
}

void InProcWorld::run(const std::function<void(Endpoint&)>& program)
{
    std::mutex failure_mutex;
    std::exception_ptr failure;

    std::vector<std::thread> threads;
    threads.reserve(endpoints_.size());
    for (auto& ep : endpoints_) {
        threads.emplace_back([&, ep = ep.get()] {
            try {
                program(*ep);
            } catch (...) {
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
                shutdown();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void InProcWorld::shutdown()
{
    shared_->down.store(true);
    for (auto& box : shared_->mailboxes) {
        box->close();
    }
}

std::vector<CommStats> InProcWorld::stats() const
{
    std::vector<CommStats> out;
    out.reserve(endpoints_.size());
    for (const auto& ep : endpoints_) {
        out.push_back(ep->stats());
    }
    return out;
}

}  // namespace spmd
