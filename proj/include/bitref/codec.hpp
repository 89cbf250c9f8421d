#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bitref/bitbuf.hpp"
#include "bitref/corpus.hpp"
#include "bitref/digest.hpp"
#include "bitref/index_format.hpp"

namespace bitref {

// The file to be encoded by reference. The digest covers the canonical byte
// serialization (final partial byte zero-padded), so for whole files it
// equals the file's SHA-256.
struct Payload {
    BitBuffer bits;
    Digest digest{};

    static Payload from_bits(BitBuffer bits);
    static Payload from_bytes(std::vector<std::uint8_t> bytes);
    static Payload from_file(const std::filesystem::path& path);
};

enum class OnMiss {
    literal,  // carry the missing chunk inline
    fail,     // abort the encode
};

struct ChunkPolicy {
    std::uint64_t chunk_bits = 4096;
    OnMiss on_miss = OnMiss::literal;
};

struct EncodeOptions {
    unsigned worker_count = 1;  // shards per search
};

struct EncodeReport {
    IndexFile index;
    std::uint64_t reference_records = 0;
    std::uint64_t literal_records = 0;
    std::uint64_t index_size_bits = 0;    // serialized native size x 8
    std::uint64_t payload_size_bits = 0;
    double savings_ratio = 0.0;           // 1 - index_size/payload_size; negative when it loses
};

// Encodes the whole payload as one reference to its leftmost occurrence.
// Membership is strict: the payload must be shorter than the image and occur
// in it, else NotFoundError.
EncodeReport encode_single(const Payload& a, const CorpusImage& b,
                           const EncodeOptions& opts = {});

// Splits the payload into consecutive chunk_bits-long chunks (last one may be
// shorter) and encodes each as a Reference to its leftmost occurrence, or per
// policy.on_miss as an inline Literal. With OnMiss::fail, throws
// NotFoundError naming the first missing chunk.
EncodeReport encode_chunked(const Payload& a, const CorpusImage& b, const ChunkPolicy& policy,
                            const EncodeOptions& opts = {});

struct DecodeOptions {
    // paper32 indexes carry no payload digest; disable the final digest check
    // for them. Length and corpus checks always run.
    bool require_payload_digest = true;
};

// Reassembles the payload from the image. Throws WrongCorpusError when the
// image digest differs from idx.corpus_digest, ValidationError when a span
// exceeds the image, CorruptionError when the result fails the digest check.
Payload decode(const IndexFile& idx, const CorpusImage& b, const DecodeOptions& opts = {});

struct DeleteOutcome {
    bool deleted = false;
    std::uint64_t freed_bits = 0;
};

// Decodes idx against b, compares bit-for-bit with the file at a_path, and
// deletes the file only when identical. Any mismatch or failure leaves the
// file untouched and throws.
DeleteOutcome verify_then_delete(const std::filesystem::path& a_path, const IndexFile& idx,
                                 const CorpusImage& b);

}  // namespace bitref
