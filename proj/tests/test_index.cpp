#include "phicalc/catalog.hpp"
#include "phicalc/index.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace phicalc;
using namespace oracle;

TEST_SUITE("index") {
    TEST_CASE("rational arithmetic") {
        CHECK(Rational(2, 4) == Rational(1, 2));
        CHECK(Rational(1, -3) == Rational(-1, 3));
        CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
        CHECK(parse_rational("-7/14") == Rational(-1, 2));
        CHECK(to_string(Rational(6, 4)) == "3/2");
        CHECK(floor(Rational(-1, 2)) == Rational(-1));
        CHECK(frac(Rational(7, 3)) == Rational(1, 3));
        CHECK_THROWS(parse_rational("1/0"));
        CHECK_THROWS(parse_rational("x"));
        CHECK_THROWS_AS(Rational(1LL << 62) * Rational(8), std::overflow_error);
    }

    TEST_CASE("extended union by hand") {
        auto E00 = IndexSet::from({{0, 0}});
        CHECK(extended_union(IndexSet::infinite(), E00) == E00);
        CHECK(extended_union(E00, E00) == IndexSet::from({{0, 1}}));
        CHECK(extended_union(E00, E00).contains(0, 1));
        auto e = extended_union(IndexSet::from({{1, 0}}), IndexSet::from({{2, 0}}));
        // (2,0) lies in the closure of (1,0), so the coincidence at 2 adds a log
        CHECK(e == IndexSet::from({{1, 0}, {2, 1}}));
        CHECK(e.max_log(1) == 0);
        CHECK(e.max_log(2) == 1);
        auto f = extended_union(IndexSet::from({{Rational(1, 2), 0}}), IndexSet::from({{2, 0}}));
        CHECK(f == IndexSet::from({{Rational(1, 2), 0}, {2, 0}}));  // no coincidence, no log
        // integer offset coincidence still produces a log
        CHECK(extended_union(IndexSet::from({{0, 0}}), IndexSet::from({{1, 0}})).max_log(1) == 1);
    }

    TEST_CASE("generator minimality") {
        auto s = IndexSet::from({{Rational(1, 2), 1}, {Rational(3, 2), 0}, {Rational(3, 2), 2}, {0, 0}});
        CHECK(s.generators().size() == 3);
        CHECK(s.leading() == Rational(0));
        CHECK_THROWS(IndexSet::from({{0, -1}}));
        CHECK_THROWS(scale(s, Rational(-1)));
    }

    TEST_CASE("closure preserved under all operations, 1000 random cases") {
        ClosureRun r = run_closure_cases(1000, 20261016);
        INFO(r.first_failure);
        CHECK(r.cases == 1000);
        CHECK(r.failures == 0);
    }

    TEST_CASE("extended union commutative and associative") {
        std::mt19937 rng(7);
        for (int c = 0; c < 200; ++c) {
            auto a = IndexSet::from(random_gens(rng)), b = IndexSet::from(random_gens(rng)),
                 d = IndexSet::from(random_gens(rng));
            CHECK(extended_union(a, b) == extended_union(b, a));
            CHECK(extended_union(extended_union(a, b), d) == extended_union(a, extended_union(b, d)));
        }
    }

    TEST_CASE("pullback along identity and composites") {
        const Catalog& c = catalog();
        std::mt19937 rng(3);
        SpacePtr m2b = c.space("M2b");
        IndexFamily f{m2b, {}};
        for (const auto& face : m2b->faces()) f.sets[face.label] = IndexSet::from(random_gens(rng));
        IndexFamily id = pullback_family(identity_bmap(m2b), f);
        for (const auto& face : m2b->faces()) CHECK(id.at(face.label) == f.at(face.label));

        // M2phi -> M2b then M2b -> base equals the direct map
        SpacePtr base = c.map("beta_b").target();
        for (int k = 0; k < 20; ++k) {
            IndexFamily g{base, {}};
            for (const auto& face : base->faces()) g.sets[face.label] = IndexSet::from(random_gens(rng));
            IndexFamily two = pullback_family(c.map("beta_phi_b"), pullback_family(c.map("beta_b"), g));
            IndexFamily one = pullback_family(c.map("beta_phi"), g);
            for (const auto& face : c.space("M2phi")->faces()) CHECK(two.at(face.label) == one.at(face.label));
        }
    }

    TEST_CASE("pullback of the right kernel along Pi_R") {
        const Catalog& c = catalog();
        Rational ap(5, 2);
        IndexFamily k = kernel_family(KernelOrder{ap, std::nullopt, 1}, c.space("M2phi_R"));
        IndexFamily p = pullback_family(c.map("Pi_R"), k);
        CHECK(p.at("011sc") == IndexSet::from({{ap - 3, 0}}));
        CHECK(p.at("O") == IndexSet::from({{ap - 3, 0}}));
        // infinite order survives wherever the column meets an infinite face
        CHECK(p.at("101sc").is_infinite());
        CHECK(p.at("110sc").is_infinite());
    }

    TEST_CASE("pushforward along Pi_C of rho_O^alpha") {
        const Catalog& c = catalog();
        const BMap& pc = c.map("Pi_C");
        SpacePtr tri = pc.source();
        IndexFamily f = uniform_family(tri, IndexSet::infinite());
        Rational alpha(7, 3);
        f.sets["O"] = IndexSet::from({{alpha, 0}});
        auto r = pushforward_family(pc, f, DensityWeight(tri->face_count(), Rational(0)));
        REQUIRE(r.integrable);
        CHECK(r.family.at("11sc") == IndexSet::from({{alpha, 0}}));

        auto all_inf = pushforward_family(pc, uniform_family(tri, IndexSet::infinite()),
                                          DensityWeight(tri->face_count(), Rational(0)));
        for (const auto& face : pc.target()->faces()) CHECK(all_inf.family.at(face.label).is_infinite());

        // a face mapped into the interior with exponent <= 0 is not integrable
        IndexFamily g = uniform_family(tri, IndexSet::infinite());
        g.sets["tau1"] = IndexSet::from({{0, 0}});
        auto bad = pushforward_family(pc, g, DensityWeight(tri->face_count(), Rational(0)));
        CHECK_FALSE(bad.integrable);
        CHECK(bad.failing_face == "tau1");
    }

    TEST_CASE("composition ledger") {
        auto L = composition_ledger(KernelOrder{3, Rational(0), 1}, KernelOrder{4, std::nullopt, 1});
        REQUIRE(L.steps.size() == 4);
        CHECK(L.steps[0].exponent == 1);
        CHECK(L.steps[1].exponent == 2);
        CHECK(L.steps[2].exponent == 2);
        CHECK(L.steps[3].exponent == 4);
        CHECK(L.steps[2].face == "11sc");
        CHECK(L.result == KernelOrder{7, std::nullopt, 1});
        CHECK(composition_ledger(KernelOrder{3, {}, 1}, KernelOrder{3, {}, 1}).steps[3].exponent == 3);
        for (int a = -2; a <= 6; ++a)
            for (int b = -2; b <= 6; ++b) {
                auto x = composition_ledger(KernelOrder{a, {}, 1}, KernelOrder{b, {}, 1});
                auto y = composition_ledger(KernelOrder{b, {}, 1}, KernelOrder{a, {}, 1});
                CHECK(x.result.a == Rational(a + b));
                CHECK(x.result == y.result);
            }
        CHECK(composition_ledger(KernelOrder{5, {}, 1}, KernelOrder{0, {}, 1}).result.a == 5);
        CHECK_THROWS(composition_ledger(KernelOrder{3, {}, 1}, KernelOrder{4, Rational(0), 1}));
    }
}
