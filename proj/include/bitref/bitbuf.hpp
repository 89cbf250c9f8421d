#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bitref {

// Raw bit accessors, MSB-first within each byte: bit 0 of byte 0x80 is 1.
inline int bit_get(const std::uint8_t* bytes, std::uint64_t i) {
    return (bytes[i >> 3] >> (7 - (i & 7))) & 1;
}

inline void bit_set(std::uint8_t* bytes, std::uint64_t i, int value) {
    std::uint8_t mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
    if (value) {
        bytes[i >> 3] |= mask;
    } else {
        bytes[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
}

// Half-open bit interval [start_bit, start_bit + bit_len).
struct BitSpan {
    std::uint64_t start_bit = 0;
    std::uint64_t bit_len = 0;

    bool operator==(const BitSpan&) const = default;
};

// Non-owning bit-addressed view over ceil(bit_len/8) readable bytes.
struct BitView {
    const std::uint8_t* data = nullptr;
    std::uint64_t bit_len = 0;

    std::uint64_t byte_len() const { return (bit_len + 7) / 8; }
};

// Immutable bit string. The final partial byte, if any, is zero-padded past
// bit_len; construction canonicalizes so equal bit strings compare equal.
class BitBuffer {
  public:
    BitBuffer() = default;
    BitBuffer(std::vector<std::uint8_t> bytes, std::uint64_t bit_len);

    static BitBuffer from_bytes(std::vector<std::uint8_t> bytes);
    // Parses a string of '0'/'1' characters, first character = bit 0.
    static BitBuffer from_bit_string(std::string_view bits);

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::uint64_t bit_len() const { return bit_len_; }
    bool empty() const { return bit_len_ == 0; }
    BitView view() const { return {bytes_.data(), bit_len_}; }
    std::string to_bit_string() const;

    bool operator==(const BitBuffer&) const = default;

  private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_len_ = 0;
};

// Bit i of buf; throws RangeError when i >= buf.bit_len.
int bit_at(BitView buf, std::uint64_t i);

// Copies span out of buf into a fresh buffer. Throws ValidationError on an
// empty span and RangeError when the span does not fit.
BitBuffer extract(BitView buf, BitSpan span);

bool equal_bits(BitView a, BitView b);

// 8 x byte size of the file; throws IoError when unreadable.
std::uint64_t bit_len_of_file(const std::filesystem::path& path);

// Copies nbits from (src, src_bit) to (dst, dst_bit). Bits of dst outside the
// target interval are preserved. Regions must not overlap.
void bit_blit(std::uint8_t* dst, std::uint64_t dst_bit, const std::uint8_t* src,
              std::uint64_t src_bit, std::uint64_t nbits);

// Accumulates a bit-exact concatenation of views.
class BitAppender {
  public:
    void reserve_bits(std::uint64_t nbits) { bytes_.reserve((nbits + 7) / 8); }
    void append(BitView v) { append_bits(v.data, 0, v.bit_len); }
    void append_bits(const std::uint8_t* src, std::uint64_t src_bit, std::uint64_t nbits);
    std::uint64_t bit_len() const { return bit_len_; }
    BitBuffer take();

  private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_len_ = 0;
};

}  // namespace bitref
