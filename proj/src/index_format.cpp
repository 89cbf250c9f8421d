#include "bitref/index_format.hpp"

#include <cstring>
#include <limits>
#include <string>

#include "bitref/errors.hpp"

namespace bitref {

namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'R', 'E', 'F'};
constexpr std::uint8_t kDigestAlgoSha256 = 0x01;
constexpr std::uint8_t kTagReference = 0x00;
constexpr std::uint8_t kTagLiteral = 0x01;

void put_u32be(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

void append_u64be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t offset() const { return offset_; }
    std::uint64_t remaining() const { return bytes_.size() - offset_; }

    std::span<const std::uint8_t> take(std::uint64_t n, const char* what) {
        if (remaining() < n) {
            throw ParseError(std::string("truncated input while reading ") + what, offset_);
        }
        auto out = bytes_.subspan(offset_, n);
        offset_ += n;
        return out;
    }

    std::uint8_t u8(const char* what) { return take(1, what)[0]; }

    std::uint64_t u64be(const char* what) {
        auto b = take(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v = (v << 8) | b[i];
        }
        return v;
    }

  private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t offset_ = 0;
};

}  // namespace

std::uint64_t record_bit_len(const IndexRecord& rec) {
    if (const auto* ref = std::get_if<ReferenceRecord>(&rec)) {
        return ref->span.bit_len;
    }
    return std::get<LiteralRecord>(rec).bits.bit_len();
}

std::uint64_t IndexFile::decoded_bit_len() const {
    std::uint64_t total = 0;
    for (const auto& rec : records) {
        total += record_bit_len(rec);
    }
    return total;
}

void IndexFile::validate() const {
    if (version != kCurrentVersion) {
        throw ValidationError("unsupported index version " + std::to_string(version));
    }
    if (payload_bit_len == 0) {
        throw ValidationError("payload_bit_len must be positive");
    }
    if (records.empty()) {
        throw ValidationError("index must contain at least one record");
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::uint64_t len = record_bit_len(records[i]);
        if (len == 0) {
            throw ValidationError("record " + std::to_string(i) + " has zero bit length");
        }
        if (const auto* ref = std::get_if<ReferenceRecord>(&records[i])) {
            if (ref->span.start_bit > std::numeric_limits<std::uint64_t>::max() - len) {
                throw ValidationError("record " + std::to_string(i) + " span overflows");
            }
        }
        total += len;
    }
    if (total != payload_bit_len) {
        throw ValidationError("record bit lengths sum to " + std::to_string(total) +
                              ", expected payload_bit_len " + std::to_string(payload_bit_len));
    }
}

std::vector<std::uint8_t> write_native(const IndexFile& idx) {
    idx.validate();
    std::vector<std::uint8_t> out;
    out.reserve(kNativeHeaderBytes + idx.records.size() * kReferenceRecordBytes);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.push_back(idx.version);
    out.push_back(kDigestAlgoSha256);
    out.insert(out.end(), idx.payload_digest.begin(), idx.payload_digest.end());
    out.insert(out.end(), idx.corpus_digest.begin(), idx.corpus_digest.end());
    append_u64be(out, idx.payload_bit_len);
    append_u64be(out, idx.records.size());
    for (const auto& rec : idx.records) {
        if (const auto* ref = std::get_if<ReferenceRecord>(&rec)) {
            out.push_back(kTagReference);
            append_u64be(out, ref->span.start_bit);
            append_u64be(out, ref->span.bit_len);
        } else {
            const auto& lit = std::get<LiteralRecord>(rec);
            out.push_back(kTagLiteral);
            append_u64be(out, lit.bits.bit_len());
            out.insert(out.end(), lit.bits.bytes().begin(), lit.bits.bytes().end());
        }
    }
    return out;
}

IndexFile read_native(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.take(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw ParseError("bad magic, not an index file", 0);
    }
    IndexFile idx;
    idx.version = r.u8("version");
    if (idx.version != IndexFile::kCurrentVersion) {
        throw ParseError("unsupported version " + std::to_string(idx.version), r.offset() - 1);
    }
    std::uint8_t algo = r.u8("digest algorithm");
    if (algo != kDigestAlgoSha256) {
        throw ParseError("unknown digest algorithm " + std::to_string(algo), r.offset() - 1);
    }
    auto pd = r.take(32, "payload digest");
    std::copy(pd.begin(), pd.end(), idx.payload_digest.begin());
    auto cd = r.take(32, "corpus digest");
    std::copy(cd.begin(), cd.end(), idx.corpus_digest.begin());
    idx.payload_bit_len = r.u64be("payload bit length");
    std::uint64_t count = r.u64be("record count");
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t tag_offset = r.offset();
        std::uint8_t tag = r.u8("record tag");
        if (tag == kTagReference) {
            std::uint64_t start = r.u64be("reference start");
            std::uint64_t len = r.u64be("reference length");
            idx.records.push_back(ReferenceRecord{{start, len}});
        } else if (tag == kTagLiteral) {
            std::uint64_t len_offset = r.offset();
            std::uint64_t len = r.u64be("literal length");
            if (len > 8 * r.remaining()) {
                throw ParseError("literal length exceeds remaining input", len_offset);
            }
            auto payload = r.take((len + 7) / 8, "literal payload");
            if (len % 8 != 0 && len > 0) {
                std::uint8_t pad_mask = static_cast<std::uint8_t>(0xFFu >> (len % 8));
                if ((payload.back() & pad_mask) != 0) {
                    throw ValidationError("literal padding bits must be zero (record " +
                                          std::to_string(i) + ")");
                }
            }
            idx.records.push_back(
                LiteralRecord{BitBuffer({payload.begin(), payload.end()}, len)});
        } else {
            throw ParseError("unknown record tag " + std::to_string(tag), tag_offset);
        }
    }
    if (r.remaining() != 0) {
        throw ParseError("trailing garbage after last record", r.offset());
    }
    idx.validate();
    return idx;
}

std::array<std::uint8_t, kPaper32Bytes> write_paper32(BitSpan span) {
    if (span.bit_len == 0) {
        throw ValidationError("empty span");
    }
    const std::uint64_t start_ordinal = span.start_bit + 1;
    const std::uint64_t end_ordinal = start_ordinal + span.bit_len;
    constexpr std::uint64_t limit = std::numeric_limits<std::uint32_t>::max();
    if (start_ordinal > limit || end_ordinal > limit) {
        throw CapacityError("bit ordinals exceed 32 bits; use the native index format");
    }
    std::array<std::uint8_t, kPaper32Bytes> out{};
    put_u32be(out.data(), static_cast<std::uint32_t>(start_ordinal));
    put_u32be(out.data() + 4, static_cast<std::uint32_t>(end_ordinal));
    return out;
}

IndexFile read_paper32(std::span<const std::uint8_t> bytes, const Digest& payload_digest,
                       const Digest& corpus_digest) {
    if (bytes.size() != kPaper32Bytes) {
        throw ParseError("expected exactly 8 bytes, got " + std::to_string(bytes.size()));
    }
    auto u32be = [&](std::size_t at) {
        return (static_cast<std::uint32_t>(bytes[at]) << 24) |
               (static_cast<std::uint32_t>(bytes[at + 1]) << 16) |
               (static_cast<std::uint32_t>(bytes[at + 2]) << 8) |
               static_cast<std::uint32_t>(bytes[at + 3]);
    };
    const std::uint32_t start_ordinal = u32be(0);
    const std::uint32_t end_ordinal = u32be(4);
    if (start_ordinal == 0) {
        throw ValidationError("bit ordinals are 1-based; start ordinal 0 is invalid");
    }
    if (end_ordinal <= start_ordinal) {
        throw ValidationError("end ordinal " + std::to_string(end_ordinal) +
                              " does not follow start ordinal " + std::to_string(start_ordinal));
    }
    IndexFile idx;
    idx.payload_digest = payload_digest;
    idx.corpus_digest = corpus_digest;
    idx.payload_bit_len = end_ordinal - start_ordinal;
    idx.records.push_back(
        ReferenceRecord{{start_ordinal - 1, static_cast<std::uint64_t>(end_ordinal) -
                                                start_ordinal}});
    return idx;
}

}  // namespace bitref
