#pragma once

#include <array>
#include <atomic>
#include <cstdint>

#include "bitref/bitbuf.hpp"
#include "bitref/kernels.hpp"

namespace bitref {

struct MatchResult {
    bool found = false;
    std::uint64_t start_bit = 0;

    bool operator==(const MatchResult&) const = default;
};

// Reusable scan plan for one (pattern, corpus) pair. For each of the 8 bit
// alignments it precomputes the pattern image shifted to that alignment and
// picks the two most selective probe bytes; scanning walks candidate byte
// positions with those probes and verifies hits bit-exactly.
//
// Immutable after construction; next() is safe to call from multiple threads.
class BitSearcher {
  public:
    // Throws ValidationError on an empty pattern.
    BitSearcher(BitView pattern, BitView corpus);

    // Leftmost occurrence with start_bit in [from, start_limit). When
    // cancel_below is set, scanning gives up early once every remaining
    // candidate position is >= its value (used by sharded search to stop
    // shards that can no longer win).
    MatchResult next(std::uint64_t from, std::uint64_t start_limit = UINT64_MAX,
                     const std::atomic<std::uint64_t>* cancel_below = nullptr) const;

  private:
    struct ShiftPlan {
        kernels::Probe probe0;
        kernels::Probe probe1;
    };

    bool matches_at(std::uint64_t start_bit, std::uint8_t* scratch,
                    std::size_t scratch_len) const;

    BitView pattern_;
    BitView corpus_;
    std::array<ShiftPlan, 8> plans_{};
};

// A occurs in B and is strictly shorter; throws ValidationError on empty
// inputs.
bool is_member(BitView a, BitView b);

// Reference oracle: direct bit comparison at every alignment.
MatchResult find_first_naive(BitView pattern, BitView corpus, std::uint64_t from);

// Accelerated search; agrees with find_first_naive on all inputs.
MatchResult find_first(BitView pattern, BitView corpus, std::uint64_t from);

// Splits candidate start positions into worker_count contiguous shards
// searched concurrently; result equals find_first(pattern, corpus, 0).
MatchResult find_first_sharded(BitView pattern, BitView corpus, unsigned worker_count);

// Number of (possibly overlapping) occurrences.
std::uint64_t count_occurrences(BitView pattern, BitView corpus);

}  // namespace bitref
