#pragma once

#include "spmd/transport/endpoint.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace spmd {

/// Wire header of a socket message: payload length, tag, source rank, each a
/// 4-byte big-endian unsigned integer, followed by the payload bytes.
struct FrameHeader {
    std::uint32_t length = 0;
    Tag tag = 0;
    std::uint32_t source = 0;

    static constexpr std::size_t kSize = 12;

    friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

std::array<std::byte, FrameHeader::kSize> encode_header(const FrameHeader& header);
FrameHeader decode_header(std::span<const std::byte, FrameHeader::kSize> bytes);

}  // namespace spmd
