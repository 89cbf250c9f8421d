#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "bitref/bitbuf.hpp"

namespace bitref {

inline std::uint64_t split_mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent per-stream seed for reproducible parallel work.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return split_mix64(split_mix64(seed) ^ split_mix64(stream));
}

// Deterministic across platforms: mt19937_64 output is fully specified by the
// standard, and bounded draws below avoid implementation-defined
// distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased draw from [0, bound); bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        if ((bound & (bound - 1)) == 0) {
            return gen_() & (bound - 1);
        }
        const std::uint64_t reject_above = UINT64_MAX - UINT64_MAX % bound;
        for (;;) {
            std::uint64_t v = gen_();
            if (v < reject_above) {
                return v % bound;
            }
        }
    }

    void fill_bytes(std::span<std::uint8_t> out) {
        std::size_t i = 0;
        for (; i + 8 <= out.size(); i += 8) {
            std::uint64_t v = gen_();
            for (int k = 0; k < 8; ++k) {
                out[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
            }
        }
        if (i < out.size()) {
            std::uint64_t v = gen_();
            for (; i < out.size(); ++i) {
                out[i] = static_cast<std::uint8_t>(v & 0xFF);
                v >>= 8;
            }
        }
    }

  private:
    std::mt19937_64 gen_;
};

inline BitBuffer random_bits(Rng& rng, std::uint64_t nbits) {
    std::vector<std::uint8_t> bytes((nbits + 7) / 8);
    rng.fill_bytes(bytes);
    return BitBuffer(std::move(bytes), nbits);
}

}  // namespace bitref
