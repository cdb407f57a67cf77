#include "phicalc/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace phicalc;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double pi = std::numbers::pi;

double gauss(int n, double t, double r2) { return std::pow(4 * pi * t, -n / 2.0) * std::exp(-r2 / (4 * t)); }

// eigenfunction series on the circle of length L
double spectral_torus(double L, double t, double d) {
    double s = 1 / L;
    for (int k = 1; k < 400; ++k) {
        double w = 2 * pi * k / L;
        double term = 2 / L * std::exp(-w * w * t) * std::cos(w * d);
        s += term;
        if (std::exp(-w * w * t) < 1e-18) break;
    }
    return s;
}

template <class F>
double integrate_line(F f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_SUITE("kernels") {
    TEST_CASE("euclid heat normalization and symmetry") {
        double v0[1] = {0};
        CHECK(euclid_heat(1, 1 / (4 * pi), v0) == doctest::Approx(1).epsilon(1e-15));
        double v[2] = {0.3, -0.7}, w[2] = {-0.3, 0.7};
        CHECK(euclid_heat(2, 0.4, v) == euclid_heat(2, 0.4, w));
        CHECK(euclid_heat(2, 0.4, v) == doctest::Approx(gauss(2, 0.4, 0.58)).epsilon(1e-14));
        CHECK_THROWS(euclid_heat(1, 0, v0));
    }

    TEST_CASE("euclid heat conservation and semigroup") {
        for (double t : {0.05, 0.5, 2.0}) {
            double I = integrate_line([&](double r) { double v[1] = {r}; return euclid_heat(1, t, v); },
                                      -40 * std::sqrt(t), 40 * std::sqrt(t));
            CHECK(std::abs(I - 1) < 1e-8);
        }
        // planar kernel in polar coordinates
        double I2 = integrate_line([](double r) { return 2 * pi * r * euclid_heat_r2(2, 0.3, r * r); }, 0, 20);
        CHECK(std::abs(I2 - 1) < 1e-8);
        // spatial convolution in one dimension
        double t = 0.2, tp = 0.35;
        for (double x : {0.0, 0.4, 1.3}) {
            double c = integrate_line(
                [&](double y) {
                    double a[1] = {x - y}, b[1] = {y};
                    return euclid_heat(1, t, a) * euclid_heat(1, tp, b);
                },
                -15, 15);
            double want[1] = {x};
            CHECK(std::abs(c - euclid_heat(1, t + tp, want)) < 1e-8);
        }
    }

    TEST_CASE("torus heat against the spectral series") {
        for (double L : {2 * pi, 1.5, 4.0})
            for (double t : {0.1, 1.0})
                for (double d : {0.0, 0.3, 1.1, -2.0}) {
                    INFO("L=" << L << " t=" << t << " d=" << d);
                    CHECK(std::abs(torus_heat(L, t, d, 0) - spectral_torus(L, t, d)) < 1e-10);
                }
        CHECK(torus_heat(3, 0.4, 0.2, 0.9) == doctest::Approx(torus_heat(3, 0.4, 3.2, 0.9)).epsilon(1e-13));
        double v[1] = {0.7};
        CHECK(std::abs(torus_heat(50, 0.5, 0.7, 0) - euclid_heat(1, 0.5, v)) < 1e-8);
    }

    TEST_CASE("torus heat conservation") {
        for (double t : {0.01, 0.3, 3.0}) {
            double L = 2.5;
            double I = integrate_line([&](double th) { return torus_heat(L, t, th, 0.4); }, 0, L);
            CHECK(std::abs(I - 1) < 1e-10);
        }
    }

    TEST_CASE("nfd kernel structure and conservation") {
        ModelGeometry g{1, 1, {3.0}};
        double U[1] = {0.2}, z[1] = {0.5}, zp[1] = {1.9};
        double tau = 0.7, S = -0.3;
        double SU[2] = {S, U[0]};
        CHECK(nfd_kernel(g, tau, S, U, z, zp) == euclid_heat(2, tau * tau, SU) * torus_heat(3.0, tau * tau, 0.5, 1.9));
        ModelGeometry line{0, 0, {}};
        double s1[1] = {S};
        CHECK(nfd_kernel(line, tau, S, {}, {}, {}) == doctest::Approx(euclid_heat(1, tau * tau, s1)).epsilon(1e-15));

        // integral over S, U and the fiber
        double I = integrate_line(
            [&](double s) {
                double inner = integrate_line(
                    [&](double u) {
                        double uu[1] = {u};
                        return integrate_line(
                            [&](double zz) {
                                double z1[1] = {zz};
                                return nfd_kernel(g, tau, s, uu, z1, zp);
                            },
                            0, 3.0);
                    },
                    -12, 12);
                return inner;
            },
            -12, 12);
        CHECK(std::abs(I - 1) < 1e-8);
    }

    TEST_CASE("ntd kernel") {
        ModelGeometry g{1, 1, {2 * pi}};
        double Uc[1] = {0.3}, Zc[1] = {0.1};
        double ref = ntd_kernel(g, 1, 0.4, Uc, Zc);
        for (double tau : {0.05, 0.2, 3.0})
            CHECK(std::abs(std::pow(tau, 3) * ntd_kernel(g, tau, 0.4, Uc, Zc) - ref) <= 1e-12 * ref);
        ModelGeometry line{0, 0, {}};
        double s[1] = {0.4};
        CHECK(ntd_kernel(line, 0.5, 0.4, {}, {}) == doctest::Approx(euclid_heat(1, 1, s) / 0.5).epsilon(1e-14));
        CHECK_THROWS(ntd_kernel(line, 0, 0.4, {}, {}));
    }

    TEST_CASE("exact kernel is the Euclidean one after inversion") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> X(0.05, 1), Y(-2, 2), T(0.01, 3);
        for (int m = 1; m <= 3; ++m)
            for (int k = 0; k < 40; ++k) {
                double x = X(rng), xp = X(rng), t = T(rng);
                std::vector<double> y(m - 1), yp(m - 1);
                for (auto& v : y) v = Y(rng);
                for (auto& v : yp) v = Y(rng);
                // p = eta / x with eta = (y, 1) / |(y, 1)|
                double ny = 1, nyp = 1;
                for (double v : y) ny += v * v;
                for (double v : yp) nyp += v * v;
                double r2 = 0;
                for (int i = 0; i < m; ++i) {
                    double a = (i < m - 1 ? y[i] : 1) / std::sqrt(ny) / x;
                    double b = (i < m - 1 ? yp[i] : 1) / std::sqrt(nyp) / xp;
                    r2 += (a - b) * (a - b);
                }
                double want = gauss(m, t, r2);
                CHECK(std::abs(exact_scattering_heat(m, t, x, y, xp, yp) - want) <= 1e-13 * want + 1e-300);
            }
        CHECK(exact_scattering_heat(1, 0.3, 0.5, {}, 0.5, {}) == doctest::Approx(1 / std::sqrt(4 * pi * 0.3)));
    }

    TEST_CASE("exact kernel conservation against dvol = x^-2 dx") {
        // m = 1: the model is the half line r = 1/x, which misses the Gaussian mass below r = 0
        for (double t : {0.1, 0.5, 2.0}) {
            double xp = 0.1;
            auto f = [&](double x) { return exact_scattering_heat(1, t, x, {}, xp, {}) / (x * x); };
            double I = integrate_line(f, 1e-3, 0.05) + integrate_line(f, 0.05, 0.1) + integrate_line(f, 0.1, 0.2) +
                       integrate_line(f, 0.2, 1e3);
            double want = 0.5 * std::erfc(-(1 / xp) / std::sqrt(4 * t));
            CHECK(std::abs(I - want) < 1e-8);
        }
    }

    TEST_CASE("chart round trips") {
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> u01(0.05, 0.95), sym(-0.8, 0.8);
        double worst = 0;
        for (int b = 0; b <= 2; ++b)
            for (int f = 0; f <= 1; ++f)
                for (int k = 0; k < 60; ++k) {
                    HeatEvalPoint p;
                    p.chart = Chart::standard;
                    p.tau = u01(rng);
                    p.xp = u01(rng);
                    p.a = u01(rng);
                    for (int i = 0; i < b; ++i) {
                        p.u.push_back(sym(rng));
                        p.yp.push_back(sym(rng));
                    }
                    for (int i = 0; i < f; ++i) {
                        p.z.push_back(sym(rng));
                        p.zp.push_back(sym(rng));
                    }
                    for (Chart c : {Chart::ff, Chart::fd, Chart::td}) {
                        HeatEvalPoint q = convert_chart(convert_chart(p, c), Chart::standard);
                        worst = std::max({worst, std::abs(q.a - p.a), std::abs(q.tau - p.tau), std::abs(q.xp - p.xp)});
                        for (int i = 0; i < b; ++i) worst = std::max(worst, std::abs(q.u[i] - p.u[i]));
                        for (int i = 0; i < f; ++i) worst = std::max(worst, std::abs(q.z[i] - p.z[i]));
                    }
                }
        CHECK(worst <= 1e-12);
        CHECK(parse_chart(to_string(Chart::fd)) == Chart::fd);
        CHECK_THROWS(parse_chart("nope"));
    }

    TEST_CASE("cutoff") {
        CutoffSpec psi{0.25};
        CHECK(psi(0) == 1);
        CHECK(psi(0.25) == 1);
        CHECK(psi(0.5) == 0);
        CHECK(psi(3) == 0);
        double prev = 1;
        for (double u = 0.25; u <= 0.5; u += 0.005) {
            CHECK(psi(u) <= prev + 1e-15);
            prev = psi(u);
        }
        CHECK(smoothstep(-1) == 0);
        CHECK(smoothstep(2) == 1);
        CHECK(smoothstep(0.5) == doctest::Approx(0.5));
    }

    TEST_CASE("model Laplacian") {
        ModelGeometry g{1, 1, {2 * pi}};
        SpatialFunction one = [](double, std::span<const double>, std::span<const double>) { return 1.0; };
        double y[1] = {0.3}, z[1] = {0.2};
        CHECK(std::abs(model_laplacian_apply(g, one, 0.4, y, z, {})) < 1e-9);

        // b = 2 kills the first order term: u = x has -x^4 * 0 - 0 * x^3 = 0
        ModelGeometry g2{2, 0, {}};
        SpatialFunction lin = [](double x, std::span<const double>, std::span<const double>) { return x; };
        double y2[2] = {0.1, 0.2};
        CHECK(std::abs(model_laplacian_apply(g2, lin, 0.4, y2, {}, {})) < 1e-7);
        // b = 0: -(2 - 0) x^3
        ModelGeometry g0{0, 0, {}};
        CHECK(model_laplacian_apply(g0, lin, 0.4, {}, {}, {}) == doctest::Approx(-2 * 0.064).epsilon(1e-6));

        // exact kernel solves the heat equation, m = 1, residual shrinks like h^2
        double t = 0.3, xp = 0.5, x = 0.6;
        auto res = [&](double h) {
            SpatialFunction u = [&](double xx, std::span<const double>, std::span<const double>) {
                return exact_scattering_heat(1, t, xx, {}, xp, {});
            };
            double dt = 1e-5;
            double ut = (exact_scattering_heat(1, t + dt, x, {}, xp, {}) - exact_scattering_heat(1, t - dt, x, {}, xp, {})) /
                        (2 * dt);
            return std::abs(ut + model_laplacian_apply(g0, u, x, {}, {}, Steps{h, h, h}));
        };
        double r1 = res(2e-3), r2 = res(1e-3);
        CHECK(r1 < 1e-4);
        CHECK(r1 / r2 == doctest::Approx(4).epsilon(0.15));
    }
}
