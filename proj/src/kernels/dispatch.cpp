#include "tsf/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tsf::kernels {

bool avx2_supported() {
#if defined(TSF_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#if !defined(TSF_HAVE_AVX2)
const Ops& avx2_ops() { return scalar_ops(); }
#endif

namespace {

const Ops& pick() {
    if (const char* env = std::getenv("TSF_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return scalar_ops();
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return avx2_ops();
    }
    return avx2_supported() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& active() {
    static const Ops& ops = pick();
    return ops;
}

}  // namespace tsf::kernels
