#include "bitref/bitbuf.hpp"

#include <cstring>

#include "bitref/errors.hpp"
#include "bitref/kernels.hpp"

namespace bitref {

BitBuffer::BitBuffer(std::vector<std::uint8_t> bytes, std::uint64_t bit_len)
    : bytes_(std::move(bytes)), bit_len_(bit_len) {
    if (bit_len_ > 8 * static_cast<std::uint64_t>(bytes_.size())) {
        throw ValidationError("bit_len " + std::to_string(bit_len_) + " exceeds " +
                              std::to_string(8 * bytes_.size()) + " available bits");
    }
    bytes_.resize((bit_len_ + 7) / 8);
    if (bit_len_ % 8 != 0) {
        bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - bit_len_ % 8));
    }
}

BitBuffer BitBuffer::from_bytes(std::vector<std::uint8_t> bytes) {
    std::uint64_t bits = 8 * static_cast<std::uint64_t>(bytes.size());
    return BitBuffer(std::move(bytes), bits);
}

BitBuffer BitBuffer::from_bit_string(std::string_view bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        char c = bits[i];
        if (c != '0' && c != '1') {
            throw ValidationError("bit string may contain only '0' and '1'");
        }
        if (c == '1') {
            bit_set(bytes.data(), i, 1);
        }
    }
    return BitBuffer(std::move(bytes), bits.size());
}

std::string BitBuffer::to_bit_string() const {
    std::string out;
    out.reserve(bit_len_);
    for (std::uint64_t i = 0; i < bit_len_; ++i) {
        out.push_back(bit_get(bytes_.data(), i) ? '1' : '0');
    }
    return out;
}

int bit_at(BitView buf, std::uint64_t i) {
    if (i >= buf.bit_len) {
        throw RangeError("bit index " + std::to_string(i) + " out of range [0, " +
                         std::to_string(buf.bit_len) + ")");
    }
    return bit_get(buf.data, i);
}

void bit_blit(std::uint8_t* dst, std::uint64_t dst_bit, const std::uint8_t* src,
              std::uint64_t src_bit, std::uint64_t nbits) {
    // Head: single bits until dst is byte-aligned.
    while (nbits > 0 && (dst_bit & 7) != 0) {
        bit_set(dst, dst_bit++, bit_get(src, src_bit++));
        --nbits;
    }
    if (nbits == 0) {
        return;
    }
    std::uint8_t* d = dst + dst_bit / 8;
    const std::uint8_t* s = src + src_bit / 8;
    const unsigned sh = src_bit & 7;
    // Bulk: full destination bytes. With a nonzero source shift the kernel
    // reads one byte past its last input, so hold one source byte back.
    std::uint64_t bulk = (sh == 0) ? nbits / 8 : (nbits - 1) / 8;
    if (bulk > 0) {
        if (sh == 0) {
            std::memcpy(d, s, bulk);
        } else {
            kernels::active_ops().shift_left_copy(d, s, bulk, sh);
        }
        dst_bit += 8 * bulk;
        src_bit += 8 * bulk;
        nbits -= 8 * bulk;
    }
    while (nbits > 0) {
        bit_set(dst, dst_bit++, bit_get(src, src_bit++));
        --nbits;
    }
}

BitBuffer extract(BitView buf, BitSpan span) {
    if (span.bit_len == 0) {
        throw ValidationError("empty span");
    }
    if (span.start_bit > buf.bit_len || span.bit_len > buf.bit_len - span.start_bit) {
        throw RangeError("span [" + std::to_string(span.start_bit) + ", +" +
                         std::to_string(span.bit_len) + ") exceeds buffer of " +
                         std::to_string(buf.bit_len) + " bits");
    }
    std::vector<std::uint8_t> out((span.bit_len + 7) / 8, 0);
    bit_blit(out.data(), 0, buf.data, span.start_bit, span.bit_len);
    return BitBuffer(std::move(out), span.bit_len);
}

bool equal_bits(BitView a, BitView b) {
    if (a.bit_len != b.bit_len) {
        return false;
    }
    std::uint64_t full = a.bit_len / 8;
    if (full > 0 && std::memcmp(a.data, b.data, full) != 0) {
        return false;
    }
    for (std::uint64_t i = 8 * full; i < a.bit_len; ++i) {
        if (bit_get(a.data, i) != bit_get(b.data, i)) {
            return false;
        }
    }
    return true;
}

std::uint64_t bit_len_of_file(const std::filesystem::path& path) {
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    if (ec) {
        throw IoError("cannot stat " + path.string() + ": " + ec.message());
    }
    return 8 * static_cast<std::uint64_t>(size);
}

void BitAppender::append_bits(const std::uint8_t* src, std::uint64_t src_bit,
                              std::uint64_t nbits) {
    if (nbits == 0) {
        return;
    }
    bytes_.resize((bit_len_ + nbits + 7) / 8, 0);
    bit_blit(bytes_.data(), bit_len_, src, src_bit, nbits);
    bit_len_ += nbits;
}

BitBuffer BitAppender::take() {
    BitBuffer out(std::move(bytes_), bit_len_);
    bytes_.clear();
    bit_len_ = 0;
    return out;
}

}  // namespace bitref
