#include "bitref/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <algorithm>

namespace bitref::kernels {

namespace {

__attribute__((target("avx2"))) std::size_t find_candidate_avx2(const std::uint8_t* data,
                                                                std::size_t readable_end,
                                                                std::size_t from,
                                                                std::size_t limit, Probe a,
                                                                Probe b) {
    std::size_t q = from;
    const std::size_t max_off = std::max(a.offset, b.offset);
    // Vector loads at data + q + off touch 32 bytes; stop the vector loop
    // while every lane stays below readable_end.
    if (readable_end > max_off + 31) {
        const std::size_t vec_end = std::min(limit, readable_end - max_off - 31);
        const __m256i va = _mm256_set1_epi8(static_cast<char>(a.value));
        const __m256i ma = _mm256_set1_epi8(static_cast<char>(a.mask));
        const __m256i vb = _mm256_set1_epi8(static_cast<char>(b.value));
        const __m256i mb = _mm256_set1_epi8(static_cast<char>(b.mask));
        while (q < vec_end) {
            __m256i da =
                _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + q + a.offset));
            __m256i db =
                _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + q + b.offset));
            __m256i ea = _mm256_cmpeq_epi8(_mm256_and_si256(da, ma), va);
            __m256i eb = _mm256_cmpeq_epi8(_mm256_and_si256(db, mb), vb);
            auto hits =
                static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_and_si256(ea, eb)));
            if (hits != 0) {
                std::size_t hit = q + static_cast<unsigned>(__builtin_ctz(hits));
                return hit < limit ? hit : limit;
            }
            q += 32;
        }
    }
    for (; q < limit; ++q) {
        if ((data[q + a.offset] & a.mask) == a.value && (data[q + b.offset] & b.mask) == b.value) {
            return q;
        }
    }
    return limit;
}

__attribute__((target("avx2"))) void shift_left_copy_avx2(std::uint8_t* dst,
                                                          const std::uint8_t* src, std::size_t n,
                                                          unsigned shift) {
    const unsigned r = 8 - shift;
    const __m128i vshift = _mm_cvtsi32_si128(static_cast<int>(shift));
    const __m128i vr = _mm_cvtsi32_si128(static_cast<int>(r));
    // Per-byte shifts built from 16-bit shifts plus a mask that drops the
    // bits leaking across byte boundaries.
    const __m256i keep_hi = _mm256_set1_epi8(static_cast<char>((0xFFu << shift) & 0xFFu));
    const __m256i keep_lo = _mm256_set1_epi8(static_cast<char>(0xFFu >> r));
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i v0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        __m256i v1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i + 1));
        __m256i hi = _mm256_and_si256(_mm256_sll_epi16(v0, vshift), keep_hi);
        __m256i lo = _mm256_and_si256(_mm256_srl_epi16(v1, vr), keep_lo);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_or_si256(hi, lo));
    }
    for (; i < n; ++i) {
        dst[i] = static_cast<std::uint8_t>((src[i] << shift) | (src[i + 1] >> r));
    }
}

}  // namespace

const Ops& avx2_ops() {
    static constexpr Ops ops{"avx2", find_candidate_avx2, shift_left_copy_avx2};
    return ops;
}

}  // namespace bitref::kernels

#endif  // x86
