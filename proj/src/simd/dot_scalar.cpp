#include "phicalc/simd.hpp"

namespace phicalc::simd {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

}  // namespace phicalc::simd
