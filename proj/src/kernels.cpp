#include "bitref/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "bitref/errors.hpp"

namespace bitref::kernels {

namespace {

const Ops* forced = nullptr;

const Ops* select_from_env() {
    if (const char* env = std::getenv("BITREF_KERNEL")) {
        std::string_view v(env);
        if (v == "scalar") {
            return &scalar_ops();
        }
        if (v == "avx2") {
            if (!cpu_has_avx2()) {
                throw ValidationError("BITREF_KERNEL=avx2 requested but CPU lacks AVX2");
            }
            return &avx2_ops();
        }
        if (!v.empty()) {
            throw ValidationError("unknown BITREF_KERNEL value: " + std::string(v));
        }
    }
    return cpu_has_avx2() ? &avx2_ops() : &scalar_ops();
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

#if !defined(__x86_64__) && !defined(__i386__)
const Ops& avx2_ops() {
    throw ValidationError("AVX2 kernels are unavailable on this architecture");
}
#endif

const Ops& active_ops() {
    if (forced != nullptr) {
        return *forced;
    }
    static const Ops* chosen = select_from_env();
    return *chosen;
}

void force_ops_for_tests(const Ops* ops) {
    forced = ops;
}

}  // namespace bitref::kernels
