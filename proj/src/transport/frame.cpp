#include "spmd/transport/frame.hpp"

namespace spmd {

namespace {

void put_u32(std::byte* out, std::uint32_t v)
{
    out[0] = static_cast<std::byte>(v >> 24);
    out[1] = static_cast<std::byte>(v >> 16);
    out[2] = static_cast<std::byte>(v >> 8);
    out[3] = static_cast<std::byte>(v);
}

std::uint32_t get_u32(const std::byte* in)
{
    return (std::to_integer<std::uint32_t>(in[0]) << 24) |
           (std::to_integer<std::uint32_t>(in[1]) << 16) |
           (std::to_integer<std::uint32_t>(in[2]) << 8) | std::to_integer<std::uint32_t>(in[3]);
}

}  // namespace

std::array<std::byte, FrameHeader::kSize> encode_header(const FrameHeader& header)
{
    std::array<std::byte, FrameHeader::kSize> out{};
    put_u32(out.data(), header.length);
    put_u32(out.data() + 4, header.tag);
    put_u32(out.data() + 8, header.source);
    return out;
}

FrameHeader decode_header(std::span<const std::byte, FrameHeader::kSize> bytes)
{
    return {get_u32(bytes.data()), get_u32(bytes.data() + 4), get_u32(bytes.data() + 8)};
}

}  // namespace spmd
