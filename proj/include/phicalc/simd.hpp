#pragma once

#include <cstddef>
#include <string>

namespace phicalc::simd {

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);
// sum_i w[i] * a[i] * b[i]
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);

// reference versions, always available
double dot_scalar(const double* a, const double* b, std::size_t n);
double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n);

#if defined(__x86_64__)
double dot_avx2(const double* a, const double* b, std::size_t n);
double weighted_dot_avx2(const double* w, const double* a, const double* b, std::size_t n);
#endif

bool avx2_available();
// "avx2" or "scalar"; PHICALC_SIMD=scalar forces the reference path
std::string active_backend();

}  // namespace phicalc::simd
