#include "phicalc/simd.hpp"

#if defined(__x86_64__)
#include <immintrin.h>

namespace phicalc::simd {

namespace {

__attribute__((target("avx2,fma"))) double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2,fma"))) double weighted_dot_avx2(const double* w, const double* a, const double* b,
                                                              std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
        s0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        s0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), s0);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

}  // namespace phicalc::simd
#endif
