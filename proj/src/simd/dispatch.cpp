#include "phicalc/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace phicalc::simd {

namespace {

bool use_avx2() {
    static const bool v = [] {
        const char* e = std::getenv("PHICALC_SIMD");
        if (e && std::strcmp(e, "scalar") == 0) return false;
        return avx2_available();
    }();
    return v;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::string active_backend() { return use_avx2() ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__)
    if (use_avx2()) return dot_avx2(a, b, n);
#endif
    return dot_scalar(a, b, n);
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__)
    if (use_avx2()) return weighted_dot_avx2(w, a, b, n);
#endif
    return weighted_dot_scalar(w, a, b, n);
}

}  // namespace phicalc::simd
