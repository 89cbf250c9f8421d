#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <vector>

#include "bitref/codec.hpp"
#include "bitref/errors.hpp"
#include "bitref/rng.hpp"

using namespace bitref;

namespace {

CorpusImage image_with_planted(Rng& rng, const BitBuffer& payload, std::uint64_t corpus_bits,
                               std::uint64_t offset) {
    std::vector<std::uint8_t> bytes((corpus_bits + 7) / 8);
    rng.fill_bytes(bytes);
    bit_blit(bytes.data(), offset, payload.bytes().data(), 0, payload.bit_len());
    return CorpusImage::from_bytes(std::move(bytes));
}

std::filesystem::path temp_file(const std::string& name, std::span<const std::uint8_t> bytes) {
    auto path = std::filesystem::temp_directory_path() / ("bitref_codec_" + name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    return path;
}

}  // namespace

TEST_CASE("worked example: 1111 inside 00111100") {
    Payload a = Payload::from_bits(BitBuffer::from_bit_string("1111"));
    CorpusImage b = CorpusImage::from_bytes({0x3C});  // 00111100

    EncodeReport report = encode_single(a, b);
    REQUIRE(report.index.records.size() == 1);
    CHECK(report.reference_records == 1);
    CHECK(report.literal_records == 0);
    const auto& span = std::get<ReferenceRecord>(report.index.records[0]).span;
    CHECK(span == BitSpan{2, 4});
    CHECK(report.payload_size_bits == 4);
    CHECK(report.index_size_bits == 8 * (kNativeHeaderBytes + kReferenceRecordBytes));

    Payload back = decode(report.index, b);
    CHECK(back.bits == a.bits);
    CHECK(back.digest == a.digest);
}

TEST_CASE("absent or equal-length payloads are not members") {
    CorpusImage b = CorpusImage::from_bytes({0x33});  // 00110011
    CHECK_THROWS_AS(encode_single(Payload::from_bits(BitBuffer::from_bit_string("1111")), b),
                    NotFoundError);
    // Bit-identical but not strictly smaller: still not a member.
    CHECK_THROWS_AS(encode_single(Payload::from_bytes({0x33}), b), NotFoundError);
    CHECK_THROWS_AS(encode_single(Payload::from_bits(BitBuffer()), b), ValidationError);
}

TEST_CASE("single-record round-trips on randomized planted payloads") {
    Rng rng(5001);
    for (int iter = 0; iter < 30; ++iter) {
        const std::uint64_t payload_bits = 256 + rng.below(2048);
        const std::uint64_t corpus_bits = 8 * (4096 + rng.below(8192));
        BitBuffer payload = random_bits(rng, payload_bits);
        std::uint64_t offset = rng.below(corpus_bits - payload_bits + 1);
        if (iter % 2 == 0) {
            offset &= ~7ULL;  // half the cases byte-aligned
        }
        CorpusImage b = image_with_planted(rng, payload, corpus_bits, offset);
        Payload a = Payload::from_bits(payload);

        EncodeOptions opts{iter % 3 == 0 ? 2u : 1u};
        EncodeReport report = encode_single(a, b, opts);
        const auto& span = std::get<ReferenceRecord>(report.index.records[0]).span;
        CHECK(span.bit_len == payload_bits);
        CHECK(span.start_bit <= offset);  // leftmost occurrence

        Payload back = decode(report.index, b);
        REQUIRE(back.digest == a.digest);
        REQUIRE(back.bits == a.bits);
    }
}

TEST_CASE("encode is deterministic") {
    Rng rng(5002);
    BitBuffer payload = random_bits(rng, 999);
    CorpusImage b = image_with_planted(rng, payload, 8 * 4096, 1234);
    Payload a = Payload::from_bits(payload);
    CHECK(write_native(encode_single(a, b).index) == write_native(encode_single(a, b).index));
}

TEST_CASE("chunked encode with all chunks planted yields only references") {
    Rng rng(5003);
    const std::uint64_t chunk_bits = 512;
    BitBuffer c1 = random_bits(rng, chunk_bits);
    BitBuffer c2 = random_bits(rng, chunk_bits);

    // Corpus contains both chunks, far apart and in swapped order.
    std::vector<std::uint8_t> bytes(8192);
    rng.fill_bytes(bytes);
    bit_blit(bytes.data(), 40001, c1.bytes().data(), 0, chunk_bits);
    bit_blit(bytes.data(), 9003, c2.bytes().data(), 0, chunk_bits);
    CorpusImage b = CorpusImage::from_bytes(std::move(bytes));

    BitAppender joined;
    joined.append(c1.view());
    joined.append(c2.view());
    Payload a = Payload::from_bits(joined.take());

    EncodeReport report = encode_chunked(a, b, {chunk_bits, OnMiss::literal});
    CHECK(report.reference_records == 2);
    CHECK(report.literal_records == 0);
    CHECK(report.savings_ratio > 0.0);
    CHECK(decode(report.index, b).bits == a.bits);
}

TEST_CASE("chunked encode falls back to literals and stays bit-exact") {
    Rng rng(5004);
    Payload a = Payload::from_bits(random_bits(rng, 10000));
    CorpusImage b = CorpusImage::from_bytes([&] {
        std::vector<std::uint8_t> v(512);  // 4096 bits: far too small to contain 4096-bit chunks
        rng.fill_bytes(v);
        return v;
    }());

    EncodeReport report = encode_chunked(a, b, {4096, OnMiss::literal});
    const std::uint64_t records = report.reference_records + report.literal_records;
    CHECK(records == 3);  // ceil(10000/4096)
    CHECK(report.reference_records == 0);
    CHECK(report.savings_ratio < 0.0);
    // Worst-case size bound: payload + header + per-record overhead.
    CHECK(report.index_size_bits <=
          a.bits.bit_len() + 8 * kNativeHeaderBytes + records * (8 * kLiteralRecordOverheadBytes + 7));

    Payload back = decode(report.index, b);
    CHECK(back.bits == a.bits);
}

TEST_CASE("on_miss=fail names the first missing chunk") {
    Rng rng(5005);
    const std::uint64_t chunk_bits = 256;
    BitBuffer c1 = random_bits(rng, chunk_bits);
    BitBuffer c2 = random_bits(rng, chunk_bits);
    CorpusImage b = image_with_planted(rng, c1, 8 * 2048, 777);  // only chunk 0 present

    BitAppender joined;
    joined.append(c1.view());
    joined.append(c2.view());
    Payload a = Payload::from_bits(joined.take());

    CHECK_THROWS_WITH_AS(encode_chunked(a, b, {chunk_bits, OnMiss::fail}),
                         doctest::Contains("chunk 1"), NotFoundError);
    CHECK_THROWS_AS(encode_chunked(a, b, {0, OnMiss::literal}), ValidationError);
}

TEST_CASE("oversized chunk_bits degenerates to a single record") {
    Rng rng(5006);
    BitBuffer payload = random_bits(rng, 500);
    CorpusImage b = image_with_planted(rng, payload, 8 * 1024, 300);
    Payload a = Payload::from_bits(payload);

    EncodeReport report = encode_chunked(a, b, {1 << 20, OnMiss::literal});
    REQUIRE(report.index.records.size() == 1);
    CHECK(report.reference_records == 1);

    // A chunk exactly as long as the image may still match (occurrence, not
    // strict membership).
    CorpusImage tiny = CorpusImage::from_bytes(payload.bytes());
    if (payload.bit_len() % 8 == 0) {
        EncodeReport whole = encode_chunked(a, tiny, {payload.bit_len(), OnMiss::literal});
        CHECK(whole.reference_records == 1);
    }
}

TEST_CASE("decode rejects the wrong image and corrupted indexes") {
    Rng rng(5007);
    BitBuffer payload = random_bits(rng, 800);
    CorpusImage b = image_with_planted(rng, payload, 8 * 2048, 555);
    Payload a = Payload::from_bits(payload);
    IndexFile idx = encode_single(a, b).index;

    SUBCASE("wrong corpus") {
        CorpusImage other = CorpusImage::from_bytes([&] {
            std::vector<std::uint8_t> v(2048);
            rng.fill_bytes(v);
            return v;
        }());
        CHECK_THROWS_AS(decode(idx, other), WrongCorpusError);
    }
    SUBCASE("span beyond the image") {
        std::get<ReferenceRecord>(idx.records[0]).span.start_bit = 8 * 2048 - 100;
        CHECK_THROWS_AS(decode(idx, b), ValidationError);
    }
    SUBCASE("payload digest mismatch") {
        idx.payload_digest[0] ^= 0xFF;
        CHECK_THROWS_AS(decode(idx, b), CorruptionError);
        DecodeOptions lax;
        lax.require_payload_digest = false;
        CHECK(decode(idx, b, lax).bits == a.bits);  // digest check was the only failure
    }
    SUBCASE("shifted span fails the digest check") {
        std::get<ReferenceRecord>(idx.records[0]).span.start_bit += 1;
        CHECK_THROWS_AS(decode(idx, b), CorruptionError);
    }
}

TEST_CASE("all-literal indexes need the image only for its digest") {
    Rng rng(5008);
    CorpusImage b = CorpusImage::from_bytes([&] {
        std::vector<std::uint8_t> v(64);
        rng.fill_bytes(v);
        return v;
    }());
    IndexFile idx;
    idx.corpus_digest = b.digest();
    BitBuffer lit = random_bits(rng, 900);
    idx.payload_bit_len = 900;
    idx.records.push_back(LiteralRecord{lit});
    idx.payload_digest = sha256(lit.bytes());

    Payload back = decode(idx, b);
    CHECK(back.bits == lit);
}

TEST_CASE("verify_then_delete deletes only on an exact match") {
    Rng rng(5009);
    std::vector<std::uint8_t> payload_bytes(700);
    rng.fill_bytes(payload_bytes);
    Payload a = Payload::from_bytes(payload_bytes);
    CorpusImage b = image_with_planted(rng, a.bits, 8 * 4096, 2222);
    IndexFile idx = encode_single(a, b).index;

    SUBCASE("matching file is deleted") {
        auto path = temp_file("match.bin", payload_bytes);
        DeleteOutcome outcome = verify_then_delete(path, idx, b);
        CHECK(outcome.deleted);
        CHECK(outcome.freed_bits == 8 * payload_bytes.size());
        CHECK(!std::filesystem::exists(path));
    }
    SUBCASE("modified file survives") {
        auto mutated = payload_bytes;
        mutated[350] ^= 0x01;
        auto path = temp_file("mutated.bin", mutated);
        CHECK_THROWS_AS(verify_then_delete(path, idx, b), CorruptionError);
        CHECK(std::filesystem::exists(path));
        std::filesystem::remove(path);
    }
    SUBCASE("truncated file survives") {
        auto shorter = payload_bytes;
        shorter.pop_back();
        auto path = temp_file("short.bin", shorter);
        CHECK_THROWS_AS(verify_then_delete(path, idx, b), CorruptionError);
        CHECK(std::filesystem::exists(path));
        std::filesystem::remove(path);
    }
    SUBCASE("wrong image leaves the file untouched") {
        auto path = temp_file("wrongb.bin", payload_bytes);
        CorpusImage other = CorpusImage::from_bytes([&] {
            std::vector<std::uint8_t> v(4096);
            rng.fill_bytes(v);
            return v;
        }());
        CHECK_THROWS_AS(verify_then_delete(path, idx, other), WrongCorpusError);
        CHECK(std::filesystem::exists(path));
        std::filesystem::remove(path);
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(
            verify_then_delete(std::filesystem::temp_directory_path() / "bitref_codec_absent",
                               idx, b),
            IoError);
    }
}

TEST_CASE("two payloads over one image decode independently") {
    Rng rng(5010);
    BitBuffer p1 = random_bits(rng, 1200);
    BitBuffer p2 = random_bits(rng, 900);
    std::vector<std::uint8_t> bytes(8192);
    rng.fill_bytes(bytes);
    bit_blit(bytes.data(), 5000, p1.bytes().data(), 0, p1.bit_len());
    bit_blit(bytes.data(), 31000, p2.bytes().data(), 0, p2.bit_len());
    CorpusImage b = CorpusImage::from_bytes(std::move(bytes));

    Payload a1 = Payload::from_bits(p1);
    Payload a2 = Payload::from_bits(p2);
    std::vector<std::uint8_t> idx1 = write_native(encode_single(a1, b).index);
    std::vector<std::uint8_t> idx2 = write_native(encode_single(a2, b).index);

    // Each serialized index is self-contained: decoding one never needs the
    // other's bytes.
    CHECK(decode(read_native(idx2), b).bits == p2);
    CHECK(decode(read_native(idx1), b).bits == p1);
}
