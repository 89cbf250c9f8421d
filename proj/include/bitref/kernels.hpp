#pragma once

#include <cstddef>
#include <cstdint>

namespace bitref::kernels {

// One masked byte test relative to a candidate base position.
struct Probe {
    std::uint32_t offset = 0;
    std::uint8_t value = 0;  // pre-masked expected byte
    std::uint8_t mask = 0;
};

// Returns the smallest q in [from, limit) with
//   (data[q + a.offset] & a.mask) == a.value  and
//   (data[q + b.offset] & b.mask) == b.value,
// or limit when there is none.
//
// readable_end is the number of dereferenceable bytes at data; the kernel
// never reads at or past it. Callers must guarantee
//   limit == from  or  limit - 1 + max(a.offset, b.offset) < readable_end.
using FindCandidateFn = std::size_t (*)(const std::uint8_t* data, std::size_t readable_end,
                                        std::size_t from, std::size_t limit, Probe a, Probe b);

// dst[i] = (src[i] << shift) | (src[i+1] >> (8 - shift)) for i in [0, n).
// shift must be in [1, 7]. Reads src[0..n] inclusive. dst and src must not
// overlap.
using ShiftLeftCopyFn = void (*)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n,
                                 unsigned shift);

struct Ops {
    const char* name;
    FindCandidateFn find_candidate;
    ShiftLeftCopyFn shift_left_copy;
};

const Ops& scalar_ops();

bool cpu_has_avx2();
// Valid to call only when cpu_has_avx2() is true.
const Ops& avx2_ops();

// Best supported implementation, overridable with BITREF_KERNEL=scalar|avx2.
const Ops& active_ops();

// Test hook: pins the active implementation; nullptr restores auto-selection.
void force_ops_for_tests(const Ops* ops);

}  // namespace bitref::kernels
