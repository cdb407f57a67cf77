#include "phicalc/simd.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace phicalc;

TEST_SUITE("simd") {
    TEST_CASE("scalar reference") {
        std::vector<double> a{1, 2, 3}, b{4, 5, 6}, w{0.5, 1, 2};
        CHECK(simd::dot_scalar(a.data(), b.data(), 3) == 32);
        CHECK(simd::weighted_dot_scalar(w.data(), a.data(), b.data(), 3) == 2 + 10 + 36);
        CHECK(simd::dot_scalar(a.data(), b.data(), 0) == 0);
    }

    TEST_CASE("avx2 matches scalar on every tail length") {
        if (!simd::avx2_available()) {
            MESSAGE("no AVX2 on this machine, scalar path only");
            CHECK(simd::active_backend() == "scalar");
            return;
        }
#if defined(__x86_64__)
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> u(-1, 1);
        for (std::size_t n = 0; n <= 67; ++n) {
            std::vector<double> a(n), b(n), w(n);
            double mag = 0, wmag = 0;
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = u(rng);
                b[i] = u(rng);
                w[i] = std::abs(u(rng));
                mag += std::abs(a[i] * b[i]);
                wmag += w[i] * std::abs(a[i] * b[i]);
            }
            INFO("n = " << n);
            CHECK(std::abs(simd::dot_avx2(a.data(), b.data(), n) - simd::dot_scalar(a.data(), b.data(), n)) <=
                  1e-14 * mag);
            CHECK(std::abs(simd::weighted_dot_avx2(w.data(), a.data(), b.data(), n) -
                           simd::weighted_dot_scalar(w.data(), a.data(), b.data(), n)) <= 1e-14 * wmag);
        }
#endif
    }

    TEST_CASE("dispatch agrees with the selected backend") {
        std::vector<double> a(101), b(101), w(101);
        for (int i = 0; i < 101; ++i) {
            a[i] = std::sin(i);
            b[i] = std::cos(0.3 * i);
            w[i] = 1.0 / (1 + i);
        }
        double want = simd::weighted_dot_scalar(w.data(), a.data(), b.data(), 101);
        CHECK(simd::weighted_dot(w.data(), a.data(), b.data(), 101) == doctest::Approx(want).epsilon(1e-14));
        CHECK(simd::dot(a.data(), b.data(), 101) ==
              doctest::Approx(simd::dot_scalar(a.data(), b.data(), 101)).epsilon(1e-14));
        std::string be = simd::active_backend();
        CHECK((be == "avx2" || be == "scalar"));
    }
}
