#include "bitref/plant.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "bitref/errors.hpp"
#include "bitref/io.hpp"
#include "bitref/rng.hpp"
#include "bitref/search.hpp"

namespace bitref {

namespace {

constexpr std::uint64_t kBlockBytes = 4 * 1024 * 1024;
constexpr std::uint64_t kCollisionCheckMaxBits = 1ULL << 27;
constexpr int kMaxAttempts = 16;

Digest write_attempt(BitView payload, std::uint64_t corpus_bits, std::uint64_t offset,
                     std::uint64_t fill_seed, const std::filesystem::path& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + out_path.string() + " for writing");
    }
    Rng fill(fill_seed);
    Sha256 hash;
    std::vector<std::uint8_t> block(kBlockBytes);
    const std::uint64_t total_bytes = corpus_bits / 8;
    for (std::uint64_t b0 = 0; b0 < total_bytes; b0 += kBlockBytes) {
        const std::uint64_t len = std::min(kBlockBytes, total_bytes - b0);
        std::span<std::uint8_t> chunk(block.data(), len);
        fill.fill_bytes(chunk);
        // Overlay the payload bits that fall inside this block.
        const std::uint64_t block_lo = 8 * b0;
        const std::uint64_t block_hi = 8 * (b0 + len);
        const std::uint64_t lo = std::max(offset, block_lo);
        const std::uint64_t hi = std::min(offset + payload.bit_len, block_hi);
        if (lo < hi) {
            bit_blit(block.data(), lo - block_lo, payload.data, lo - offset, hi - lo);
        }
        hash.update(chunk);
        out.write(reinterpret_cast<const char*>(block.data()),
                  static_cast<std::streamsize>(len));
        if (!out) {
            throw IoError("write to " + out_path.string() + " failed");
        }
    }
    if (!out.flush()) {
        throw IoError("write to " + out_path.string() + " failed");
    }
    return hash.finish();
}

}  // namespace

PlantResult plant_corpus(BitView payload, std::uint64_t corpus_bits,
                         std::optional<std::uint64_t> offset, std::uint64_t seed,
                         const std::filesystem::path& out_path) {
    if (payload.bit_len == 0) {
        throw ValidationError("cannot plant an empty payload");
    }
    if (corpus_bits == 0 || corpus_bits % 8 != 0) {
        throw ValidationError("corpus_bits must be a positive multiple of 8 (whole-byte image)");
    }
    if (payload.bit_len > corpus_bits) {
        throw ValidationError("payload (" + std::to_string(payload.bit_len) +
                              " bits) does not fit in a " + std::to_string(corpus_bits) +
                              "-bit image");
    }
    const std::uint64_t slack = corpus_bits - payload.bit_len;
    if (offset && *offset > slack) {
        throw ValidationError("offset " + std::to_string(*offset) + " + payload " +
                              std::to_string(payload.bit_len) + " bits exceeds the " +
                              std::to_string(corpus_bits) + "-bit image");
    }

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t fill_seed = derive_seed(seed, 2 * static_cast<std::uint64_t>(attempt));
        std::uint64_t off;
        if (offset) {
            off = *offset;
        } else {
            Rng draw(derive_seed(seed, 2 * static_cast<std::uint64_t>(attempt) + 1));
            off = draw.below(slack + 1);
        }
        Digest digest = write_attempt(payload, corpus_bits, off, fill_seed, out_path);
        if (corpus_bits <= kCollisionCheckMaxBits && payload.bit_len < corpus_bits) {
            MappedFile map = MappedFile::open_readonly(out_path);
            BitView image{map.bytes().data(), corpus_bits};
            MatchResult leftmost = find_first(payload, image, 0);
            if (!leftmost.found || leftmost.start_bit != off) {
                continue;  // random fill collided ahead of the plant; re-roll
            }
        }
        return PlantResult{off, corpus_bits, digest};
    }
    throw ValidationError("random fill kept colliding with the payload after " +
                          std::to_string(kMaxAttempts) + " attempts; use a longer payload");
}

}  // namespace bitref
