#pragma once

#include "spmd/core/codec.hpp"
#include "spmd/core/context.hpp"
#include "spmd/core/lazy.hpp"
#include "spmd/errors.hpp"
#include "spmd/transport/collectives.hpp"
#include "spmd/transport/communicator.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace spmd {

/// Value held by exactly one rank of a group.
template <typename T>
class DistSingleton {
public:
    DistSingleton(RankId owner, std::optional<T> value) : owner_(owner), value_(std::move(value)) {}

    RankId owner() const noexcept { return owner_; }
    bool has_value() const noexcept { return value_.has_value(); }
    const std::optional<T>& value() const noexcept { return value_; }

private:
    RankId owner_;
    std::optional<T> value_;
};

/// A sequence distributed over a communication group: element i lives on
/// group rank i, as a lazily evaluated value.
///
/// Every rank of the world builds the same logical sequence (SPMD) and runs
/// every operation on it. Ranks outside the group, or beyond the sequence
/// length, own nothing and execute each operation as a nop. Communicating
/// operations (reduce, all_gather, apply) are collective over the group and
/// must be reached in the same order by all members.
template <typename T>
class DistSeq {
public:
    using value_type = T;

    /// `make(i)` runs only on the owner of element i, on first use.
    static DistSeq generate(Context& ctx, Communicator group, std::size_t length,
                            std::function<T(std::size_t)> make)
    {
        DistSeq seq(ctx, std::move(group), length);
        if (seq.index_) {
            const std::size_t i = *seq.index_;
            seq.element_.emplace([make = std::move(make), i] { return make(i); });
        }
        return seq;
    }

    /// Over the default group: world ranks 0 .. min(length, p) - 1.
    static DistSeq generate(Context& ctx, std::size_t length, std::function<T(std::size_t)> make)
    {
        return generate(ctx, default_group(ctx, length), length, std::move(make));
    }

    std::size_t size() const noexcept { return length_; }
    const Communicator& group() const noexcept { return group_; }
    Context& context() const noexcept { return *ctx_; }

    std::optional<std::size_t> local_index() const noexcept { return index_; }
    bool owns() const noexcept { return index_.has_value(); }

    /// Owner's element (materializing it); nullptr on every other rank.
    const T* local() const { return element_ ? &element_->get() : nullptr; }

    /// mapD: owners transform their element; no communication.
    template <typename F>
    auto map(F&& f) const -> DistSeq<std::decay_t<std::invoke_result_t<F&, const T&>>>
    {
        using U = std::decay_t<std::invoke_result_t<F&, const T&>>;
        DistSeq<U> out(*ctx_, group_, length_);
        if (element_) {
            ++ctx_->counters().element_ops;
            out.element_.emplace(Lazy<U>::ready(f(element_->get())));
        }
        return out;
    }

    /// reduceD: group rank 0 receives the fold of all elements in index order.
    template <typename Combine>
    DistSingleton<T> reduce(Combine&& combine) const
    {
        ++ctx_->counters().collective_calls;
        if (length_ == 0) {
            throw EmptySequenceError("reduce of an empty distributed sequence");
        }
        require_fully_owned("reduce");
        const RankId root = group_.world_rank(0);
        if (!group_.is_member()) {
            return {root, std::nullopt};
        }
        ByteCombine on_bytes = [&combine](const Bytes& left, const Bytes& right) {
            return spmd::encode<T>(combine(decode<T>(left), decode<T>(right)));
        };
        Communicator comm = group_;
        auto folded = spmd::reduce(comm, 0, spmd::encode<T>(element_->get()), on_bytes);
        if (!folded) {
            return {root, std::nullopt};
        }
        return {root, decode<T>(*folded)};
    }

    /// allGatherD: every group rank gets [e_0, ..., e_{n-1}]; nullopt elsewhere.
    std::optional<std::vector<T>> all_gather() const
    {
        ++ctx_->counters().collective_calls;
        if (length_ == 0) {
            return std::vector<T>{};
        }
        require_fully_owned("all_gather");
        if (!group_.is_member()) {
            return std::nullopt;
        }
        Communicator comm = group_;
        std::vector<T> out;
        out.reserve(length_);
        for (const Bytes& b : spmd::all_gather(comm, spmd::encode<T>(element_->get()))) {
            out.push_back(decode<T>(b));
        }
        return out;
    }

    /// apply(i): every group rank gets element i (a broadcast from its owner).
    std::optional<T> apply(std::size_t i) const
    {
        ++ctx_->counters().collective_calls;
        if (i >= length_) {
            throw IndexError("apply(" + std::to_string(i) + ") on a sequence of length " +
                             std::to_string(length_));
        }
        if (i >= static_cast<std::size_t>(group_.size())) {
            throw IndexError("apply(" + std::to_string(i) + "): element has no owner");
        }
        if (!group_.is_member()) {
            return std::nullopt;
        }
        Communicator comm = group_;
        Bytes payload;
        if (index_ == i) {
            payload = spmd::encode<T>(element_->get());
        }
        return decode<T>(spmd::broadcast(comm, static_cast<int>(i), std::move(payload)));
    }

private:
    template <typename>
    friend class DistSeq;
    template <typename A, typename B>
    friend DistSeq<std::pair<A, B>> zip(const DistSeq<A>&, const DistSeq<B>&);

    DistSeq(Context& ctx, Communicator group, std::size_t length)
        : ctx_(&ctx), group_(std::move(group)), length_(length)
    {
        if (group_.is_member() && static_cast<std::size_t>(group_.rank()) < length_) {
            index_ = static_cast<std::size_t>(group_.rank());
        }
    }

    static Communicator default_group(Context& ctx, std::size_t length)
    {
        std::vector<int> ranks(std::min(length, static_cast<std::size_t>(ctx.size())));
        std::iota(ranks.begin(), ranks.end(), 0);
        return ctx.world().derive(ranks);
    }

    void require_fully_owned(const char* what) const
    {
        if (length_ != static_cast<std::size_t>(group_.size())) {
            throw IndexError(std::string(what) + ": sequence of length " + std::to_string(length_) +
                             " over a group of " + std::to_string(group_.size()) +
                             " ranks leaves elements without an owner");
        }
    }

    Context* ctx_;
    Communicator group_;
    std::size_t length_;
    std::optional<std::size_t> index_;
    std::optional<Lazy<T>> element_;
};

/// Integers lo..hi inclusive over the default group (empty when hi < lo).
inline DistSeq<std::int64_t> from_range(Context& ctx, std::int64_t lo, std::int64_t hi)
{
    const std::size_t length = hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1);
    return DistSeq<std::int64_t>::generate(
        ctx, length, [lo](std::size_t i) { return lo + static_cast<std::int64_t>(i); });
}

/// Pairs element i of `a` with element i of `b` on its owner without
/// materializing either. Both sequences must share length and group.
template <typename A, typename B>
DistSeq<std::pair<A, B>> zip(const DistSeq<A>& a, const DistSeq<B>& b)
{
    if (a.size() != b.size()) {
        throw ShapeError("zip of sequences of length " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
    }
    const auto ma = a.group().members();
    const auto mb = b.group().members();
    if (!std::equal(ma.begin(), ma.end(), mb.begin(), mb.end())) {
        throw AlignmentError("zip of sequences distributed over different groups");
    }
    DistSeq<std::pair<A, B>> out(a.context(), a.group(), a.size());
    if (a.element_ && b.element_) {
        out.element_.emplace([ea = *a.element_, eb = *b.element_] {
            return std::pair<A, B>(ea.get(), eb.get());
        });
    }
    return out;
}

/// map after zip, with a binary function.
template <typename A, typename B, typename F>
auto zip_with(const DistSeq<A>& a, const DistSeq<B>& b, F&& f)
{
    return zip(a, b).map([&f](const std::pair<A, B>& ab) { return f(ab.first, ab.second); });
}

/// Prints the caller's view: `DSeq(Some(v))` on an owner, `DSeq(None)` elsewhere.
template <typename T>
std::ostream& operator<<(std::ostream& out, const DistSeq<T>& seq)
{
    if (const T* v = seq.local()) {
        return out << "DSeq(Some(" << *v << "))";
    }
    return out << "DSeq(None)";
}

}  // namespace spmd
