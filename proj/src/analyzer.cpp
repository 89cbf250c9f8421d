#include "bitref/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bitref/errors.hpp"
#include "bitref/rng.hpp"
#include "bitref/search.hpp"

namespace bitref {

namespace {

// Below 2^-1100 a double underflows to exactly 0 anyway; capping the exponent
// keeps the ldexp argument within int range for absurd L.
constexpr std::uint64_t kUnderflowBits = 1100;

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

double expected_occurrences(std::uint64_t n, std::uint64_t L) {
    if (L == 0) {
        throw ValidationError("chunk length must be positive");
    }
    if (L > n) {
        return 0.0;
    }
    if (L > kUnderflowBits) {
        return 0.0;
    }
    // Exact scaling by a power of two; subnormals cover L up to ~1074 even
    // before the alignment count shrinks the product.
    return std::ldexp(static_cast<double>(n - L + 1), -static_cast<int>(L));
}

double match_probability(std::uint64_t n, std::uint64_t L) {
    const double e = expected_occurrences(n, L);
    const double p = -std::expm1(-e);
    return std::clamp(p, 0.0, 1.0);
}

std::uint64_t break_even_length(std::uint64_t record_cost_bits) {
    if (record_cost_bits == 0) {
        throw ValidationError("record cost must be positive");
    }
    return record_cost_bits + 1;
}

std::uint64_t max_feasible_chunk(std::uint64_t n, double target_probability) {
    if (!(target_probability > 0.0 && target_probability < 1.0)) {
        throw ValidationError("target probability must lie strictly between 0 and 1");
    }
    if (match_probability(n, 1) < target_probability) {
        return 0;
    }
    // match_probability is strictly decreasing in L up to L = n and zero
    // beyond, so bisect with lo always feasible and hi always infeasible.
    std::uint64_t lo = 1;
    std::uint64_t hi = n + 1;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (match_probability(n, mid) >= target_probability) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

FeasibilityReport feasibility_report(std::uint64_t payload_bits, std::uint64_t n,
                                     std::uint64_t L, std::uint64_t record_cost_bits) {
    if (payload_bits == 0 || n == 0 || L == 0 || record_cost_bits == 0) {
        throw ValidationError("all report parameters must be positive");
    }
    FeasibilityReport r;
    r.payload_bits = payload_bits;
    r.corpus_bits = n;
    r.chunk_bits = L;
    r.expected_occurrences = expected_occurrences(n, L);
    r.match_probability = match_probability(n, L);
    r.record_cost_bits = record_cost_bits;
    r.break_even_bits = break_even_length(record_cost_bits);
    const double chunks = static_cast<double>((payload_bits + L - 1) / L);
    const double p = r.match_probability;
    const double per_chunk = p * static_cast<double>(record_cost_bits) +
                             (1.0 - p) * static_cast<double>(kLiteralOverheadBits + L);
    r.projected_index_bits = chunks * per_chunk;
    r.verdict = r.projected_index_bits < static_cast<double>(payload_bits) ? Verdict::saves
                                                                           : Verdict::loses;
    return r;
}

std::string FeasibilityReport::to_text() const {
    std::ostringstream out;
    out << "payload bits          " << payload_bits << '\n'
        << "corpus bits           " << corpus_bits << '\n'
        << "chunk bits            " << chunk_bits << '\n'
        << "expected occurrences  " << format_real(expected_occurrences) << '\n'
        << "match probability     " << format_real(match_probability) << '\n'
        << "record cost bits      " << record_cost_bits << '\n'
        << "break-even bits       " << break_even_bits << '\n'
        << "projected index bits  " << format_real(projected_index_bits) << '\n'
        << "verdict               " << (verdict == Verdict::saves ? "Saves" : "Loses") << '\n';
    return out.str();
}

std::string FeasibilityReport::to_kv() const {
    std::ostringstream out;
    out << "payload_bits=" << payload_bits << '\n'
        << "corpus_bits=" << corpus_bits << '\n'
        << "chunk_bits=" << chunk_bits << '\n'
        << "expected_occurrences=" << format_real(expected_occurrences) << '\n'
        << "match_probability=" << format_real(match_probability) << '\n'
        << "record_cost_bits=" << record_cost_bits << '\n'
        << "break_even_bits=" << break_even_bits << '\n'
        << "projected_index_bits=" << format_real(projected_index_bits) << '\n'
        << "verdict=" << (verdict == Verdict::saves ? "saves" : "loses") << '\n';
    return out.str();
}

double mc_occurrence_mean(std::uint64_t n, std::uint64_t L, unsigned trials,
                          std::uint64_t seed) {
    if (L == 0 || n == 0 || trials == 0) {
        throw ValidationError("n, L, and trials must be positive");
    }
    std::uint64_t total = 0;
    for (unsigned t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        BitBuffer pattern = random_bits(rng, L);
        BitBuffer corpus = random_bits(rng, n);
        if (L <= n) {
            total += count_occurrences(pattern.view(), corpus.view());
        }
    }
    return static_cast<double>(total) / static_cast<double>(trials);
}

double mc_match_frequency(std::uint64_t n, std::uint64_t L, unsigned trials,
                          std::uint64_t seed) {
    if (L == 0 || n == 0 || trials == 0) {
        throw ValidationError("n, L, and trials must be positive");
    }
    unsigned hits = 0;
    for (unsigned t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        BitBuffer pattern = random_bits(rng, L);
        BitBuffer corpus = random_bits(rng, n);
        if (L <= n && find_first(pattern.view(), corpus.view(), 0).found) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace bitref
