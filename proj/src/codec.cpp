#include "bitref/codec.hpp"

#include <string>
#include <utility>

#include "bitref/errors.hpp"
#include "bitref/io.hpp"
#include "bitref/search.hpp"

namespace bitref {

namespace {

MatchResult search_leftmost(BitView pattern, BitView corpus, unsigned worker_count) {
    if (worker_count > 1) {
        return find_first_sharded(pattern, corpus, worker_count);
    }
    return find_first(pattern, corpus, 0);
}

EncodeReport make_report(IndexFile idx, std::uint64_t payload_bits) {
    EncodeReport report;
    report.index_size_bits = 8 * static_cast<std::uint64_t>(write_native(idx).size());
    report.payload_size_bits = payload_bits;
    for (const auto& rec : idx.records) {
        if (std::holds_alternative<ReferenceRecord>(rec)) {
            ++report.reference_records;
        } else {
            ++report.literal_records;
        }
    }
    report.savings_ratio = 1.0 - static_cast<double>(report.index_size_bits) /
                                     static_cast<double>(payload_bits);
    report.index = std::move(idx);
    return report;
}

}  // namespace

Payload Payload::from_bits(BitBuffer bits) {
    Payload p;
    p.digest = sha256(bits.bytes());
    p.bits = std::move(bits);
    return p;
}

Payload Payload::from_bytes(std::vector<std::uint8_t> bytes) {
    return from_bits(BitBuffer::from_bytes(std::move(bytes)));
}

Payload Payload::from_file(const std::filesystem::path& path) {
    return from_bytes(read_file(path));
}

EncodeReport encode_single(const Payload& a, const CorpusImage& b, const EncodeOptions& opts) {
    const std::uint64_t n = a.bits.bit_len();
    if (n == 0) {
        throw ValidationError("cannot encode an empty payload");
    }
    // Strict membership: equal length is not "smaller", hence not a member.
    if (n >= b.bit_len()) {
        throw NotFoundError("payload (" + std::to_string(n) +
                            " bits) is not smaller than the image (" +
                            std::to_string(b.bit_len()) + " bits), so it cannot be a member");
    }
    MatchResult hit = search_leftmost(a.bits.view(), b.view(), opts.worker_count);
    if (!hit.found) {
        throw NotFoundError("payload does not occur in the image");
    }
    IndexFile idx;
    idx.payload_digest = a.digest;
    idx.corpus_digest = b.digest();
    idx.payload_bit_len = n;
    idx.records.push_back(ReferenceRecord{{hit.start_bit, n}});
    return make_report(std::move(idx), n);
}

EncodeReport encode_chunked(const Payload& a, const CorpusImage& b, const ChunkPolicy& policy,
                            const EncodeOptions& opts) {
    const std::uint64_t n = a.bits.bit_len();
    if (n == 0) {
        throw ValidationError("cannot encode an empty payload");
    }
    if (policy.chunk_bits == 0) {
        throw ValidationError("chunk_bits must be positive");
    }
    IndexFile idx;
    idx.payload_digest = a.digest;
    idx.corpus_digest = b.digest();
    idx.payload_bit_len = n;
    const std::uint64_t chunk_count = (n + policy.chunk_bits - 1) / policy.chunk_bits;
    idx.records.reserve(chunk_count);
    for (std::uint64_t i = 0; i < chunk_count; ++i) {
        const std::uint64_t start = i * policy.chunk_bits;
        const std::uint64_t len = std::min(policy.chunk_bits, n - start);
        BitBuffer chunk = extract(a.bits.view(), {start, len});
        MatchResult hit{};
        if (len <= b.bit_len()) {
            hit = search_leftmost(chunk.view(), b.view(), opts.worker_count);
        }
        if (hit.found) {
            idx.records.push_back(ReferenceRecord{{hit.start_bit, len}});
        } else if (policy.on_miss == OnMiss::literal) {
            idx.records.push_back(LiteralRecord{std::move(chunk)});
        } else {
            throw NotFoundError("chunk " + std::to_string(i) + " of " +
                                std::to_string(chunk_count) + " (bits " + std::to_string(start) +
                                ".." + std::to_string(start + len) +
                                ") does not occur in the image");
        }
    }
    return make_report(std::move(idx), n);
}

Payload decode(const IndexFile& idx, const CorpusImage& b, const DecodeOptions& opts) {
    if (b.digest() != idx.corpus_digest) {
        throw WrongCorpusError("index is bound to image " + to_hex(idx.corpus_digest) +
                               " but the supplied image has digest " + to_hex(b.digest()));
    }
    idx.validate();
    BitAppender out;
    out.reserve_bits(idx.payload_bit_len);
    const BitView corpus = b.view();
    for (std::size_t i = 0; i < idx.records.size(); ++i) {
        if (const auto* ref = std::get_if<ReferenceRecord>(&idx.records[i])) {
            const BitSpan span = ref->span;
            if (span.start_bit > corpus.bit_len || span.bit_len > corpus.bit_len - span.start_bit) {
                throw ValidationError("record " + std::to_string(i) + " spans bits " +
                                      std::to_string(span.start_bit) + ".." +
                                      std::to_string(span.start_bit + span.bit_len) +
                                      ", beyond the image's " + std::to_string(corpus.bit_len) +
                                      " bits");
            }
            out.append_bits(corpus.data, span.start_bit, span.bit_len);
        } else {
            out.append(std::get<LiteralRecord>(idx.records[i]).bits.view());
        }
    }
    BitBuffer bits = out.take();
    if (bits.bit_len() != idx.payload_bit_len) {
        throw CorruptionError("decoded " + std::to_string(bits.bit_len()) + " bits, expected " +
                              std::to_string(idx.payload_bit_len));
    }
    Digest actual = sha256(bits.bytes());
    if (opts.require_payload_digest && actual != idx.payload_digest) {
        throw CorruptionError("decoded payload digest " + to_hex(actual) +
                              " does not match the recorded digest " +
                              to_hex(idx.payload_digest));
    }
    Payload p;
    p.bits = std::move(bits);
    p.digest = actual;
    return p;
}

DeleteOutcome verify_then_delete(const std::filesystem::path& a_path, const IndexFile& idx,
                                 const CorpusImage& b) {
    std::vector<std::uint8_t> original = read_file(a_path);
    Payload decoded = decode(idx, b);
    if (decoded.bits.bit_len() != 8 * static_cast<std::uint64_t>(original.size()) ||
        decoded.bits.bytes() != original) {
        throw CorruptionError("decoded payload does not match " + a_path.string() +
                              "; file left untouched");
    }
    std::error_code ec;
    if (!std::filesystem::remove(a_path, ec) || ec) {
        throw IoError("verified but could not delete " + a_path.string() +
                      (ec ? ": " + ec.message() : ""));
    }
    return DeleteOutcome{true, decoded.bits.bit_len()};
}

}  // namespace bitref
