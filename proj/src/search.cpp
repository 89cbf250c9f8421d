#include "bitref/search.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

#include "bitref/errors.hpp"

namespace bitref {

namespace {

constexpr std::uint64_t kScanChunkBytes = std::uint64_t{4} << 20;
// Probes are chosen within the leading bytes of each shifted image.
constexpr std::uint32_t kProbeWindowBytes = 64;
constexpr std::size_t kVerifyBlockBytes = 4096;

// Byte j of the pattern image placed at bit offset `shift`, as value + mask
// of the positions that carry pattern bits.
struct MaskedByte {
    std::uint8_t value = 0;
    std::uint8_t mask = 0;
};

MaskedByte shifted_image_byte(BitView pattern, unsigned shift, std::uint32_t j) {
    MaskedByte out;
    for (unsigned t = 0; t < 8; ++t) {
        std::uint64_t image_bit = 8 * static_cast<std::uint64_t>(j) + t;
        if (image_bit < shift || image_bit - shift >= pattern.bit_len) {
            continue;
        }
        out.mask |= static_cast<std::uint8_t>(0x80u >> t);
        if (bit_get(pattern.data, image_bit - shift)) {
            out.value |= static_cast<std::uint8_t>(0x80u >> t);
        }
    }
    return out;
}

void validate_pattern(BitView pattern) {
    if (pattern.bit_len == 0) {
        throw ValidationError("search pattern must be nonempty");
    }
}

void validate_from(BitView corpus, std::uint64_t from) {
    if (from > corpus.bit_len) {
        throw RangeError("search origin " + std::to_string(from) + " past end of corpus (" +
                         std::to_string(corpus.bit_len) + " bits)");
    }
}

}  // namespace

BitSearcher::BitSearcher(BitView pattern, BitView corpus)
    : pattern_(pattern), corpus_(corpus) {
    validate_pattern(pattern);
    for (unsigned s = 0; s < 8; ++s) {
        const std::uint64_t image_bytes = (s + pattern.bit_len + 7) / 8;
        const auto window =
            static_cast<std::uint32_t>(std::min<std::uint64_t>(image_bytes, kProbeWindowBytes));
        // probe0: earliest byte with the widest mask; probe1: latest such
        // byte elsewhere in the window, for selectivity during the scan.
        std::uint32_t best0 = 0;
        int pop0 = -1;
        std::vector<MaskedByte> bytes(window);
        for (std::uint32_t j = 0; j < window; ++j) {
            bytes[j] = shifted_image_byte(pattern, s, j);
            int pop = std::popcount(bytes[j].mask);
            if (pop > pop0) {
                pop0 = pop;
                best0 = j;
            }
        }
        std::uint32_t best1 = best0;
        int pop1 = -1;
        for (std::uint32_t j = window; j-- > 0;) {
            if (j == best0) {
                continue;
            }
            int pop = std::popcount(bytes[j].mask);
            if (pop > pop1) {
                pop1 = pop;
                best1 = j;
            }
        }
        plans_[s].probe0 = {best0, bytes[best0].value, bytes[best0].mask};
        plans_[s].probe1 = {best1, bytes[best1].value, bytes[best1].mask};
    }
}

bool BitSearcher::matches_at(std::uint64_t start_bit, std::uint8_t* scratch,
                             std::size_t scratch_len) const {
    const unsigned s = start_bit & 7;
    const std::uint64_t q = start_bit >> 3;
    const std::uint64_t full = pattern_.bit_len / 8;
    const std::uint8_t* c = corpus_.data;
    if (s == 0) {
        if (full > 0 && std::memcmp(c + q, pattern_.data, full) != 0) {
            return false;
        }
    } else {
        std::uint64_t done = 0;
        while (done < full) {
            std::size_t blk = static_cast<std::size_t>(std::min<std::uint64_t>(full - done,
                                                                               scratch_len));
            kernels::active_ops().shift_left_copy(scratch, c + q + done, blk, s);
            if (std::memcmp(scratch, pattern_.data + done, blk) != 0) {
                return false;
            }
            done += blk;
        }
    }
    for (std::uint64_t i = 8 * full; i < pattern_.bit_len; ++i) {
        if (bit_get(c, start_bit + i) != bit_get(pattern_.data, i)) {
            return false;
        }
    }
    return true;
}

MatchResult BitSearcher::next(std::uint64_t from, std::uint64_t start_limit,
                              const std::atomic<std::uint64_t>* cancel_below) const {
    const std::uint64_t m = pattern_.bit_len;
    const std::uint64_t n = corpus_.bit_len;
    if (m > n) {
        return {};
    }
    const std::uint64_t last_start = n - m;
    std::uint64_t limit = std::min(start_limit, last_start + 1);
    if (from >= limit) {
        return {};
    }

    std::uint8_t small_scratch[96];
    std::vector<std::uint8_t> big_scratch;
    std::uint8_t* scratch = small_scratch;
    std::size_t scratch_len = sizeof(small_scratch);
    if (m / 8 > sizeof(small_scratch)) {
        big_scratch.resize(kVerifyBlockBytes);
        scratch = big_scratch.data();
        scratch_len = big_scratch.size();
    }

    const std::size_t readable = static_cast<std::size_t>(corpus_.byte_len());
    const std::uint64_t first_chunk = (from > 7 ? from - 7 : 0) / 8;
    const std::uint64_t chunk_end = (limit - 1) / 8 + 1;
    std::uint64_t best = UINT64_MAX;

    for (std::uint64_t c0 = first_chunk; c0 < chunk_end; c0 += kScanChunkBytes) {
        if (cancel_below != nullptr &&
            cancel_below->load(std::memory_order_relaxed) <= 8 * c0) {
            return {};
        }
        const std::uint64_t c1 = std::min(c0 + kScanChunkBytes, chunk_end);
        for (unsigned s = 0; s < 8; ++s) {
            const std::uint64_t hi_excl = std::min(limit, best);
            if (hi_excl <= s) {
                continue;
            }
            const std::uint64_t hi_bit = hi_excl - 1;
            if (hi_bit < s) {
                continue;
            }
            const std::uint64_t q_lo = (from > s) ? (from - s + 7) / 8 : 0;
            const std::uint64_t q_hi = (hi_bit - s) / 8;  // inclusive
            std::uint64_t qa = std::max(q_lo, c0);
            const std::uint64_t qb = std::min(q_hi + 1, c1);
            const ShiftPlan& plan = plans_[s];
            while (qa < qb) {
                std::size_t hit = kernels::active_ops().find_candidate(
                    corpus_.data, readable, static_cast<std::size_t>(qa),
                    static_cast<std::size_t>(qb), plan.probe0, plan.probe1);
                if (hit >= qb) {
                    break;
                }
                const std::uint64_t p = 8 * static_cast<std::uint64_t>(hit) + s;
                if (matches_at(p, scratch, scratch_len)) {
                    best = std::min(best, p);
                    break;
                }
                qa = hit + 1;
            }
        }
        if (best != UINT64_MAX) {
            return {true, best};
        }
    }
    return {};
}

MatchResult find_first_naive(BitView pattern, BitView corpus, std::uint64_t from) {
    validate_pattern(pattern);
    validate_from(corpus, from);
    if (pattern.bit_len > corpus.bit_len) {
        return {};
    }
    const std::uint64_t last_start = corpus.bit_len - pattern.bit_len;
    for (std::uint64_t p = from; p <= last_start; ++p) {
        bool ok = true;
        for (std::uint64_t i = 0; i < pattern.bit_len; ++i) {
            if (bit_get(corpus.data, p + i) != bit_get(pattern.data, i)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return {true, p};
        }
    }
    return {};
}

MatchResult find_first(BitView pattern, BitView corpus, std::uint64_t from) {
    validate_from(corpus, from);
    return BitSearcher(pattern, corpus).next(from);
}

MatchResult find_first_sharded(BitView pattern, BitView corpus, unsigned worker_count) {
    if (worker_count < 1) {
        throw ValidationError("worker_count must be >= 1");
    }
    validate_pattern(pattern);
    if (worker_count == 1) {
        return find_first(pattern, corpus, 0);
    }
    if (pattern.bit_len > corpus.bit_len) {
        return {};
    }
    const std::uint64_t candidates = corpus.bit_len - pattern.bit_len + 1;
    const std::uint64_t shard = (candidates + worker_count - 1) / worker_count;
    const unsigned used = static_cast<unsigned>(
        std::min<std::uint64_t>(worker_count, (candidates + shard - 1) / shard));

    const BitSearcher searcher(pattern, corpus);
    std::atomic<std::uint64_t> best{UINT64_MAX};
    std::vector<std::exception_ptr> errors(used);
    std::vector<std::thread> threads;
    threads.reserve(used);
    for (unsigned w = 0; w < used; ++w) {
        threads.emplace_back([&, w] {
            try {
                const std::uint64_t lo = static_cast<std::uint64_t>(w) * shard;
                const std::uint64_t hi = std::min(candidates, lo + shard);
                MatchResult r = searcher.next(lo, hi, &best);
                if (r.found) {
                    std::uint64_t cur = best.load();
                    while (r.start_bit < cur &&
                           !best.compare_exchange_weak(cur, r.start_bit)) {
                    }
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    const std::uint64_t found = best.load();
    if (found == UINT64_MAX) {
        return {};
    }
    return {true, found};
}

bool is_member(BitView a, BitView b) {
    if (a.bit_len == 0 || b.bit_len == 0) {
        throw ValidationError("membership requires nonempty inputs");
    }
    return a.bit_len < b.bit_len && find_first(a, b, 0).found;
}

std::uint64_t count_occurrences(BitView pattern, BitView corpus) {
    validate_pattern(pattern);
    if (pattern.bit_len > corpus.bit_len) {
        return 0;
    }
    const BitSearcher searcher(pattern, corpus);
    std::uint64_t count = 0;
    std::uint64_t from = 0;
    for (;;) {
        MatchResult r = searcher.next(from);
        if (!r.found) {
            return count;
        }
        ++count;
        from = r.start_bit + 1;
    }
}

}  // namespace bitref
