#include "spmd/transport/mailbox.hpp"

#include "spmd/errors.hpp"

#include <string>

namespace spmd {

Mailbox::Mailbox(int world_size) : source_closed_(static_cast<std::size_t>(world_size), false) {}

void Mailbox::push(int source, Tag tag, Bytes payload)
{
    {
        std::lock_guard lock(mutex_);
        queues_[{source, tag}].push_back(std::move(payload));
    }
    arrived_.notify_all();
}

std::optional<Bytes> Mailbox::pop(int source, Tag tag, std::optional<Clock::time_point> deadline)
{
    std::unique_lock lock(mutex_);
    const auto key = std::make_pair(source, tag);
    for (;;) {
        if (closed_) {
            throw TransportError("transport shut down while waiting for rank " +
                                 std::to_string(source));
        }
        if (auto it = queues_.find(key); it != queues_.end() && !it->second.empty()) {
            Bytes payload = std::move(it->second.front());
            it->second.pop_front();
            if (it->second.empty()) {
                queues_.erase(it);
            }
            return payload;
        }
        if (source_closed_.at(static_cast<std::size_t>(source))) {
            throw TransportError("rank " + std::to_string(source) + " disconnected");
        }
        if (deadline) {
            if (arrived_.wait_until(lock, *deadline) == std::cv_status::timeout) {
                return std::nullopt;
            }
        } else {
            arrived_.wait(lock);
        }
    }
}

void Mailbox::close_source(int source)
{
    {
        std::lock_guard lock(mutex_);
        source_closed_.at(static_cast<std::size_t>(source)) = true;
    }
    arrived_.notify_all();
}

void Mailbox::close()
{
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    arrived_.notify_all();
}

}  // namespace spmd
