#include "phicalc/asymptotics.hpp"

#include <doctest.h>

#include <cmath>

using namespace phicalc;

namespace {

std::vector<double> eval_on(const std::vector<double>& s, double (*f)(double)) {
    std::vector<double> v;
    for (double x : s) v.push_back(f(x));
    return v;
}

}  // namespace

TEST_SUITE("asymptotics") {
    TEST_CASE("pure powers") {
        auto s = geometric_grid();
        REQUIRE(s.size() == 12);
        for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] < s[k - 1]);
        auto f = fit_values(s, eval_on(s, [](double x) { return 3.5 * std::pow(x, -2.0); }));
        CHECK(f.slope == doctest::Approx(-2).epsilon(1e-10));
        CHECK(f.residual < 1e-10);
        CHECK(f.verdict == "ok");
        auto g = fit_values(s, eval_on(s, [](double x) { return std::pow(x, 1.5) * (1 + x); }));
        CHECK(std::abs(g.slope - 1.5) < 0.2);
    }

    TEST_CASE("infinite order") {
        auto s = geometric_grid(0.5, 0.7, 12);
        auto v = eval_on(s, [](double x) { return std::exp(-1 / x); });
        CHECK(check_infinite_order(s, v, 8).pass);
        auto p = eval_on(s, [](double x) { return x * x * x; });
        auto r = check_infinite_order(s, p, 8);
        CHECK_FALSE(r.pass);
        CHECK(r.failing_n >= 1);
        CHECK(r.failing_n <= 3);
    }

    TEST_CASE("exact kernel orders at td and fd") {
        for (int m = 1; m <= 2; ++m) {
            ModelGeometry g{m - 1, 0, {}};
            KernelEvaluator K = exact_scattering_heat(m);
            CHECK(std::abs(fit_face_order(K, standard_path("td", g)).slope + m) <= 0.05);
            CHECK(fit_face_order(K, standard_path("fd", g)).slope >= -0.05);
        }
        CHECK_THROWS(standard_path("xx", ModelGeometry{0, 0, {}}));
    }

    TEST_CASE("residual of H0 beats the td branch") {
        ModelGeometry g{0, 0, {}};
        auto a = residual_order(g, initial_parametrix(g));
        auto b = residual_order(g, td_branch_parametrix(g));
        CHECK(a.resolved);
        CHECK(a.fit.slope - b.fit.slope >= 0.9);
    }
}
