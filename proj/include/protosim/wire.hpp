#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "protosim/model.hpp"

namespace protosim {

/// One gossip transmission: a snapshot of the sender's codebook stamped with
/// the sender's logical clock.
struct GossipMessage {
    std::uint32_t sender = 0;
    std::uint64_t version = 0;  // sender's logical clock at send time, >= 1
    std::vector<Prototype> prototypes;
    double send_tick = 0.0;  // scheduling metadata, not part of the encoding
};

/// Encoded length in bytes: a 20-byte header (sender u32, version u64,
/// count u32, dimension u32) plus count * (8 * dimension + 12) payload bytes
/// (feature doubles, label i32, relevance u64), all little-endian.
std::size_t encoded_size(std::size_t prototype_count, std::size_t dimension);
std::size_t encoded_size(const GossipMessage& msg);

/// Canonical byte encoding. Prototype ids and creation ticks are local
/// bookkeeping and do not travel.
std::vector<std::uint8_t> encode(const GossipMessage& msg);

/// Inverse of encode. Decoded prototypes get ids 0..count-1 and creation
/// tick 0. Truncated or inconsistent input raises std::invalid_argument.
GossipMessage decode(std::span<const std::uint8_t> bytes);

}  // namespace protosim
