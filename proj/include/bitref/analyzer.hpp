#pragma once

#include <cstdint>
#include <string>

namespace bitref {

// Record costs in bits, from the index wire formats.
inline constexpr std::uint64_t kNativeReferenceCostBits = 136;  // 17-byte record
inline constexpr std::uint64_t kPaper32CostBits = 64;           // two 32-bit ordinals
inline constexpr std::uint64_t kLiteralOverheadBits = 72;       // 9-byte record header

// Expected number of occurrences of a fixed L-bit pattern in an n-bit string
// of i.i.d. uniform bits: (n - L + 1) * 2^(-L) for L <= n, else 0.
double expected_occurrences(std::uint64_t n, std::uint64_t L);

// Poisson approximation of P(at least one occurrence): 1 - exp(-E), clamped
// to [0, 1]. Never exceeds min(1, E).
double match_probability(std::uint64_t n, std::uint64_t L);

// Smallest chunk length for which one reference record is strictly smaller
// than the chunk it replaces: record_cost_bits + 1.
std::uint64_t break_even_length(std::uint64_t record_cost_bits);

// Largest L with match_probability(n, L) >= target_probability, found by
// bisection over the monotone probability; 0 when even L=1 misses the target.
std::uint64_t max_feasible_chunk(std::uint64_t n, double target_probability);

enum class Verdict { saves, loses };

struct FeasibilityReport {
    std::uint64_t payload_bits = 0;
    std::uint64_t corpus_bits = 0;
    std::uint64_t chunk_bits = 0;
    double expected_occurrences = 0.0;
    double match_probability = 0.0;
    std::uint64_t record_cost_bits = 0;
    std::uint64_t break_even_bits = 0;
    double projected_index_bits = 0.0;
    Verdict verdict = Verdict::loses;

    std::string to_text() const;  // aligned human-readable table
    std::string to_kv() const;    // one key=value pair per line
};

// Projects the index size for encoding payload_bits against an n-bit image
// with chunk length L: ceil(a/L) chunks, each a reference with probability p
// or a literal (overhead + chunk bits) otherwise. Saves iff the projection
// is smaller than the payload.
FeasibilityReport feasibility_report(std::uint64_t payload_bits, std::uint64_t n,
                                     std::uint64_t L, std::uint64_t record_cost_bits);

// Monte Carlo checks of the formulas under the same random-bits model, fully
// determined by the seed. Trial t draws an L-bit pattern and an n-bit string
// from an independent stream derived as (seed, t).
double mc_occurrence_mean(std::uint64_t n, std::uint64_t L, unsigned trials, std::uint64_t seed);
double mc_match_frequency(std::uint64_t n, std::uint64_t L, unsigned trials, std::uint64_t seed);

}  // namespace bitref
