#include "bitref/kernels.hpp"

namespace bitref::kernels {

namespace {

std::size_t find_candidate_scalar(const std::uint8_t* data, std::size_t /*readable_end*/,
                                  std::size_t from, std::size_t limit, Probe a, Probe b) {
    for (std::size_t q = from; q < limit; ++q) {
        if ((data[q + a.offset] & a.mask) == a.value && (data[q + b.offset] & b.mask) == b.value) {
            return q;
        }
    }
    return limit;
}

void shift_left_copy_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n,
                            unsigned shift) {
    const unsigned r = 8 - shift;
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = static_cast<std::uint8_t>((src[i] << shift) | (src[i + 1] >> r));
    }
}

}  // namespace

const Ops& scalar_ops() {
    static constexpr Ops ops{"scalar", find_candidate_scalar, shift_left_copy_scalar};
    return ops;
}

}  // namespace bitref::kernels
