#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "bitref/bitbuf.hpp"
#include "bitref/digest.hpp"

namespace bitref {

struct PlantResult {
    std::uint64_t offset_bit = 0;  // where the payload actually landed
    std::uint64_t corpus_bits = 0;
    Digest corpus_digest{};
};

// Writes a corpus_bits-long image of seeded uniform random bits to out_path
// with the payload's bits overwriting the region at offset (drawn uniformly
// from the valid range when absent; may be non-byte-aligned). corpus_bits
// must be a multiple of 8 so the image is a whole-byte file.
//
// Deterministic: identical arguments produce a byte-identical image. For
// images up to 2^27 bits the result is checked for an accidental earlier
// occurrence of the payload and re-rolled with fresh random fill if one
// exists, so the planted offset is also the leftmost occurrence.
PlantResult plant_corpus(BitView payload, std::uint64_t corpus_bits,
                         std::optional<std::uint64_t> offset, std::uint64_t seed,
                         const std::filesystem::path& out_path);

}  // namespace bitref
