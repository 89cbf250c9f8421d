#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bitref/bitbuf.hpp"
#include "bitref/digest.hpp"

namespace bitref {

// Payload bits located inside the corpus image.
struct ReferenceRecord {
    BitSpan span;

    bool operator==(const ReferenceRecord&) const = default;
};

// Payload bits carried inline when no corpus match exists.
struct LiteralRecord {
    BitBuffer bits;

    bool operator==(const LiteralRecord&) const = default;
};

using IndexRecord = std::variant<ReferenceRecord, LiteralRecord>;

std::uint64_t record_bit_len(const IndexRecord& rec);

// The index file: header binding one payload to one corpus image, followed by
// ordered records whose concatenated decoded bits equal the payload.
struct IndexFile {
    static constexpr std::uint8_t kCurrentVersion = 1;

    std::uint8_t version = kCurrentVersion;
    Digest payload_digest{};
    Digest corpus_digest{};
    std::uint64_t payload_bit_len = 0;
    std::vector<IndexRecord> records;

    std::uint64_t decoded_bit_len() const;
    // Throws ValidationError when any structural invariant is broken.
    void validate() const;

    bool operator==(const IndexFile&) const = default;
};

// Native wire format, all multi-byte integers big-endian:
//   "BREF" | version 0x01 | digest-algo 0x01 (SHA-256) | payload_digest (32)
//   | corpus_digest (32) | payload_bit_len (8) | record_count (8) | records.
//   Reference record: tag 0x00 | start_bit (8, 0-based) | bit_len (8).
//   Literal record:   tag 0x01 | bit_len (8) | ceil(bit_len/8) payload bytes,
//                     MSB-first, zero-padded.
inline constexpr std::size_t kNativeHeaderBytes = 86;
inline constexpr std::size_t kReferenceRecordBytes = 17;
inline constexpr std::size_t kLiteralRecordOverheadBytes = 9;

std::vector<std::uint8_t> write_native(const IndexFile& idx);
IndexFile read_native(std::span<const std::uint8_t> bytes);

// 64-bit compatibility format: two 32-bit big-endian 1-based bit ordinals,
// start and one-past-end, so that end - start is the bit length. Carries no
// metadata; digests travel out-of-band.
inline constexpr std::size_t kPaper32Bytes = 8;

std::array<std::uint8_t, kPaper32Bytes> write_paper32(BitSpan span);
IndexFile read_paper32(std::span<const std::uint8_t> bytes, const Digest& payload_digest,
                       const Digest& corpus_digest);

}  // namespace bitref
