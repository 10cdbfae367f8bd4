#pragma once

#include "spmd/errors.hpp"
#include "spmd/transport/endpoint.hpp"

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace spmd {

/// Sequential reader over an encoded payload. Overruns raise CodecError.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

    std::span<const std::byte> take(std::size_t count)
    {
        if (count > bytes_.size() - offset_) {
            throw CodecError("payload truncated: need " + std::to_string(count) + " bytes, have " +
                             std::to_string(bytes_.size() - offset_));
        }
        auto out = bytes_.subspan(offset_, count);
        offset_ += count;
        return out;
    }

    bool done() const noexcept { return offset_ == bytes_.size(); }

private:
    std::span<const std::byte> bytes_;
    std::size_t offset_ = 0;
};

/// Word serialization of element types used in communicating operations.
/// Specialize with `static void encode(const T&, Bytes&)` and
/// `static T decode(ByteReader&)`. Scalars are stored in host byte order.
template <typename T, typename Enable = void>
struct Codec;

template <typename T>
struct Codec<T, std::enable_if_t<std::is_arithmetic_v<T>>> {
    static void encode(const T& value, Bytes& out)
    {
        const auto* p = reinterpret_cast<const std::byte*>(&value);
        out.insert(out.end(), p, p + sizeof(T));
    }

    static T decode(ByteReader& in)
    {
        T value;
        std::memcpy(&value, in.take(sizeof(T)).data(), sizeof(T));
        return value;
    }
};

template <>
struct Codec<std::byte> {
    static void encode(std::byte value, Bytes& out) { out.push_back(value); }
    static std::byte decode(ByteReader& in) { return in.take(1)[0]; }
};

template <>
struct Codec<std::string> {
    static void encode(const std::string& value, Bytes& out)
    {
        Codec<std::uint64_t>::encode(value.size(), out);
        const auto* p = reinterpret_cast<const std::byte*>(value.data());
        out.insert(out.end(), p, p + value.size());
    }

    static std::string decode(ByteReader& in)
    {
        const auto size = Codec<std::uint64_t>::decode(in);
        auto raw = in.take(size);
        return std::string(reinterpret_cast<const char*>(raw.data()), raw.size());
    }
};

template <typename A, typename B>
struct Codec<std::pair<A, B>> {
    static void encode(const std::pair<A, B>& value, Bytes& out)
    {
        Codec<A>::encode(value.first, out);
        Codec<B>::encode(value.second, out);
    }

    static std::pair<A, B> decode(ByteReader& in)
    {
        A first = Codec<A>::decode(in);
        B second = Codec<B>::decode(in);
        return {std::move(first), std::move(second)};
    }
};

template <typename T>
struct Codec<std::vector<T>> {
    static void encode(const std::vector<T>& value, Bytes& out)
    {
        Codec<std::uint64_t>::encode(value.size(), out);
        for (const auto& v : value) {
            Codec<T>::encode(v, out);
        }
    }

    static std::vector<T> decode(ByteReader& in)
    {
        const auto size = Codec<std::uint64_t>::decode(in);
        std::vector<T> out;
        out.reserve(static_cast<std::size_t>(size));
        for (std::uint64_t i = 0; i < size; ++i) {
            out.push_back(Codec<T>::decode(in));
        }
        return out;
    }
};

template <typename T>
Bytes encode(const T& value)
{
    Bytes out;
    Codec<T>::encode(value, out);
    return out;
}

/// Decodes a whole payload; trailing bytes are an error.
template <typename T>
T decode(std::span<const std::byte> bytes)
{
    ByteReader in(bytes);
    T value = Codec<T>::decode(in);
    if (!in.done()) {
        throw CodecError("trailing bytes after decoded value");
    }
    return value;
}

}  // namespace spmd
