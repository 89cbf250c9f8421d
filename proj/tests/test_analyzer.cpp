#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "bitref/analyzer.hpp"
#include "bitref/errors.hpp"

using namespace bitref;

namespace {

// Occurrences of an L-bit pattern in an n-bit value, both little test
// integers with bit i of the string = bit (width-1-i) of the value.
int occurrences_in_value(std::uint32_t corpus, int n, std::uint32_t pattern, int L) {
    if (L > n) {
        return 0;
    }
    const std::uint32_t mask = (L == 32) ? 0xFFFFFFFFu : ((1u << L) - 1);
    int count = 0;
    for (int s = 0; s + L <= n; ++s) {
        const std::uint32_t window = (corpus >> (n - L - s)) & mask;
        if (window == pattern) {
            ++count;
        }
    }
    return count;
}

}  // namespace

TEST_CASE("expected_occurrences matches the closed form") {
    // (2^20 - 19) / 2^20
    CHECK(expected_occurrences(1 << 20, 20) == doctest::Approx(0.9999818802).epsilon(1e-9));
    CHECK(expected_occurrences(1 << 20, 20) ==
          std::ldexp(static_cast<double>((1 << 20) - 19), -20));
    CHECK(expected_occurrences(64, 64) == std::ldexp(1.0, -64));  // n == L: one alignment
    CHECK(expected_occurrences(10, 11) == 0.0);                   // L > n
    CHECK(expected_occurrences(1, 1) == 0.5);
    CHECK(expected_occurrences(1 << 20, 5000) == 0.0);  // deep underflow
    CHECK_THROWS_AS(expected_occurrences(8, 0), ValidationError);
}

TEST_CASE("expected occurrences over all corpora is exact at tiny scale") {
    // Summing occurrence counts over every possible n-bit corpus must give
    // exactly (n - L + 1) * 2^(n - L) for any fixed pattern: an integer
    // identity the formula's expectation is derived from.
    for (int n = 4; n <= 14; n += 2) {
        for (int L = 1; L <= 4; ++L) {
            for (std::uint32_t pattern : {0u, 1u, (1u << L) - 1, 0x5u & ((1u << L) - 1)}) {
                std::uint64_t total = 0;
                for (std::uint32_t corpus = 0; corpus < (1u << n); ++corpus) {
                    total += static_cast<std::uint64_t>(
                        occurrences_in_value(corpus, n, pattern, L));
                }
                const std::uint64_t expect =
                    static_cast<std::uint64_t>(n - L + 1) << (n - L);
                REQUIRE(total == expect);
                // And the implementation returns exactly total / 2^n.
                REQUIRE(expected_occurrences(n, L) ==
                        static_cast<double>(total) / std::ldexp(1.0, n));
            }
        }
    }
}

TEST_CASE("expected_occurrences is monotone") {
    for (std::uint64_t n : {64ULL, 1024ULL, 1ULL << 20}) {
        double prev = expected_occurrences(n, 1);
        for (std::uint64_t L = 2; L <= 64; ++L) {
            const double cur = expected_occurrences(n, L);
            CHECK(cur <= prev);  // nonincreasing in L
            prev = cur;
        }
    }
    for (std::uint64_t L : {4ULL, 16ULL, 40ULL}) {
        double prev = expected_occurrences(L, L);
        for (std::uint64_t n = L + 1; n < L + 200; n += 13) {
            const double cur = expected_occurrences(n, L);
            CHECK(cur >= prev);  // nondecreasing in n
            prev = cur;
        }
    }
}

TEST_CASE("match_probability approximates and never exceeds the union bound") {
    // Small E: probability ~ E.
    const double e30 = expected_occurrences(1 << 20, 30);
    CHECK(e30 == doctest::Approx(9.765625e-4).epsilon(1e-3));
    CHECK(match_probability(1 << 20, 30) == doctest::Approx(e30).epsilon(1e-3));

    // Large E: clamps to exactly 1.
    CHECK(match_probability(1 << 20, 1) == 1.0);

    for (std::uint64_t n : {8ULL, 256ULL, 1ULL << 16, 1ULL << 32}) {
        for (std::uint64_t L = 1; L <= 40; ++L) {
            const double p = match_probability(n, L);
            const double e = expected_occurrences(n, L);
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 1.0);
            REQUIRE(p <= std::min(1.0, e) + 1e-15);
        }
    }
}

TEST_CASE("break-even lengths") {
    CHECK(break_even_length(136) == 137);
    CHECK(break_even_length(64) == 65);
    CHECK(break_even_length(1) == 2);
    CHECK_THROWS_AS(break_even_length(0), ValidationError);
}

TEST_CASE("max_feasible_chunk agrees with a linear scan") {
    auto oracle = [](std::uint64_t n, double target) {
        std::uint64_t best = 0;
        for (std::uint64_t L = 1; L <= n && L <= 80; ++L) {
            if (match_probability(n, L) >= target) {
                best = L;
            }
        }
        return best;
    };
    for (std::uint64_t n : {8ULL, 100ULL, 1ULL << 16, 1ULL << 32}) {
        for (double target : {0.1, 0.5, 0.9, 0.999}) {
            CHECK(max_feasible_chunk(n, target) == oracle(n, target));
        }
    }
    // At n = 2^32 and target 1/2 the crossover sits near log2(n).
    const std::uint64_t L = max_feasible_chunk(1ULL << 32, 0.5);
    CHECK(L >= 30);
    CHECK(L <= 34);
    // n=8, target 0.9: L=1 gives p=1-exp(-4)~0.982, L=2 gives ~0.826.
    CHECK(max_feasible_chunk(8, 0.9) == 1);
    CHECK_THROWS_AS(max_feasible_chunk(8, 0.0), ValidationError);
    CHECK_THROWS_AS(max_feasible_chunk(8, 1.0), ValidationError);
}

TEST_CASE("max_feasible_chunk shrinks as the target grows") {
    std::uint64_t prev = UINT64_MAX;
    for (double target : {0.05, 0.25, 0.5, 0.75, 0.95, 0.999}) {
        const std::uint64_t L = max_feasible_chunk(1ULL << 24, target);
        CHECK(L <= prev);
        prev = L;
    }
}

TEST_CASE("feasibility projections") {
    SUBCASE("the worked 4 Gb scenario loses for random data") {
        FeasibilityReport r = feasibility_report(1000000000ULL, 1ULL << 35, 4096, 136);
        CHECK(r.match_probability == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r.verdict == Verdict::loses);
        // All 244,141 chunks project as literals: 72 + 4096 bits each.
        CHECK(r.projected_index_bits == doctest::Approx(244141.0 * 4168.0).epsilon(1e-9));
        CHECK(r.projected_index_bits > 1e9);
    }
    SUBCASE("chunks at or below the record cost always lose") {
        for (std::uint64_t n : {1ULL << 10, 1ULL << 20, 1ULL << 35}) {
            for (std::uint64_t L : {1ULL, 64ULL, 135ULL, 136ULL}) {
                CHECK(feasibility_report(1 << 20, n, L, 136).verdict == Verdict::loses);
            }
        }
    }
    SUBCASE("certain matches save exactly when chunks out-size the record") {
        // n = 2^40, L = 20: E ~ 2^20, so p is exactly 1 after clamping.
        REQUIRE(match_probability(1ULL << 40, 20) == 1.0);
        FeasibilityReport wins = feasibility_report(1 << 20, 1ULL << 40, 20, 16);
        const double chunks = std::ceil(double(1 << 20) / 20.0);
        CHECK(wins.projected_index_bits == doctest::Approx(chunks * 16.0));
        CHECK(wins.verdict == Verdict::saves);
        FeasibilityReport loses = feasibility_report(1 << 20, 1ULL << 40, 20, 25);
        CHECK(loses.projected_index_bits == doctest::Approx(chunks * 25.0));
        CHECK(loses.verdict == Verdict::loses);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(feasibility_report(0, 8, 4, 136), ValidationError);
        CHECK_THROWS_AS(feasibility_report(8, 0, 4, 136), ValidationError);
        CHECK_THROWS_AS(feasibility_report(8, 8, 0, 136), ValidationError);
        CHECK_THROWS_AS(feasibility_report(8, 8, 4, 0), ValidationError);
    }
}

TEST_CASE("report serialization carries every field") {
    FeasibilityReport r = feasibility_report(1 << 20, 1 << 30, 4096, 136);
    const std::string kv = r.to_kv();
    for (const char* key :
         {"payload_bits=", "corpus_bits=", "chunk_bits=", "expected_occurrences=",
          "match_probability=", "record_cost_bits=", "break_even_bits=",
          "projected_index_bits=", "verdict="}) {
        CAPTURE(key);
        CHECK(kv.find(key) != std::string::npos);
    }
    CHECK(kv.find("verdict=loses") != std::string::npos);
    const std::string text = r.to_text();
    CHECK(text.find("Loses") != std::string::npos);
    CHECK(text.find("1048576") != std::string::npos);
}

TEST_CASE("Monte Carlo occurrence mean tracks the formula") {
    const std::uint64_t n = 1 << 14;
    const std::uint64_t L = 8;
    const unsigned trials = 60;
    const double e = expected_occurrences(n, L);
    const double mean = mc_occurrence_mean(n, L, trials, 7);
    const double band = 4.0 * std::sqrt(e / trials);  // counts are ~Poisson
    CHECK(std::abs(mean - e) <= band);
    // Deterministic for a fixed seed.
    CHECK(mc_occurrence_mean(n, L, trials, 7) == mean);
}

TEST_CASE("Monte Carlo hit frequency tracks match_probability") {
    const std::uint64_t n = 1 << 12;
    const std::uint64_t L = 12;
    const unsigned trials = 100;
    const double p = match_probability(n, L);
    const double freq = mc_match_frequency(n, L, trials, 11);
    CHECK(std::abs(freq - p) <= 0.2);  // 4 sigma of a Bernoulli mean at 100 trials
    CHECK(mc_match_frequency(n, L, trials, 11) == freq);
    CHECK_THROWS_AS(mc_match_frequency(n, L, 0, 11), ValidationError);
}
