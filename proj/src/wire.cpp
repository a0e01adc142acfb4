#include "protosim/wire.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace protosim {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(value);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

template <typename T>
T take(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    if (pos + sizeof(T) > bytes.size())
        throw std::invalid_argument("decode: truncated message");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
        return std::bit_cast<double>(bits);
    } else {
        return static_cast<T>(bits);
    }
}

}  // namespace

std::size_t encoded_size(std::size_t prototype_count, std::size_t dimension) {
    return 20 + prototype_count * (8 * dimension + 12);
}

std::size_t encoded_size(const GossipMessage& msg) {
    const std::size_t dim = msg.prototypes.empty() ? 0 : msg.prototypes.front().vector.size();
    return encoded_size(msg.prototypes.size(), dim);
}

std::vector<std::uint8_t> encode(const GossipMessage& msg) {
    const std::size_t dim = msg.prototypes.empty() ? 0 : msg.prototypes.front().vector.size();
    std::vector<std::uint8_t> out;
    out.reserve(encoded_size(msg));
    put<std::uint32_t>(out, msg.sender);
    put<std::uint64_t>(out, msg.version);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(msg.prototypes.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
    for (const Prototype& p : msg.prototypes) {
        if (p.vector.size() != dim)
            throw std::invalid_argument("encode: prototypes differ in dimension");
        for (const double v : p.vector) put<double>(out, v);
        put<std::int32_t>(out, static_cast<std::int32_t>(p.label));
        put<std::uint64_t>(out, p.relevance);
    }
    return out;
}

GossipMessage decode(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    GossipMessage msg;
    msg.sender = take<std::uint32_t>(bytes, pos);
    msg.version = take<std::uint64_t>(bytes, pos);
    const auto count = take<std::uint32_t>(bytes, pos);
    const auto dim = take<std::uint32_t>(bytes, pos);
    msg.prototypes.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Prototype p;
        p.id = static_cast<std::int64_t>(i);
        p.vector.resize(dim);
        for (std::uint32_t k = 0; k < dim; ++k) p.vector[k] = take<double>(bytes, pos);
        p.label = static_cast<int>(take<std::int32_t>(bytes, pos));
        p.relevance = take<std::uint64_t>(bytes, pos);
        msg.prototypes.push_back(std::move(p));
    }
    if (pos != bytes.size())
        throw std::invalid_argument("decode: trailing bytes after payload");
    return msg;
}

}  // namespace protosim
