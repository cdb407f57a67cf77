#include "phicalc/catalog.hpp"
#include "phicalc/golden.hpp"
#include "phicalc/reports.hpp"

#include <doctest.h>

#include <random>
#include <regex>

using namespace phicalc;

namespace {

std::set<std::string> labels(const CornerSpace& s) {
    std::set<std::string> out;
    for (const auto& f : s.faces()) out.insert(f.label);
    return out;
}

std::vector<Variable> xx() {
    Variable x{"x"}, xp{"x'"};
    x.face = "rf";
    xp.face = "lf";
    return {x, xp};
}

}  // namespace

TEST_SUITE("corner") {
    TEST_CASE("face sets of the catalog") {
        const Catalog& c = catalog();
        CHECK(labels(*c.space("M2b")) == std::set<std::string>{"lf", "rf", "ff"});
        // 7 corner faces, 3 scattering fronts, O, the temporal front and tau', tau''
        CHECK(labels(*c.space("HM3phi")) ==
              std::set<std::string>{"100", "010", "001", "111", "110", "101", "011", "110sc", "101sc", "011sc", "O",
                                    "tauO", "tau1", "tau2"});
        CHECK(c.space("HM3phi")->face_count() == 14);
    }

    TEST_CASE("blow up of the quarter plane") {
        auto [s, beta] = run_program("M2b_test", xx(), {BlowupCenter{"ff", {"x", "x'"}, {}, "ff"}});
        Monomial x = lift_monomial(beta, monomial_from(*beta.target(), {{"x", 1}}));
        CHECK(x[s->face_index("rf")] == 1);
        CHECK(x[s->face_index("ff")] == 1);
        CHECK(x[s->face_index("lf")] == 0);
        CHECK(s->same_layout(*catalog().space("M2b")));
        // constant 1 lifts to the zero vector
        Monomial one = lift_monomial(beta, Monomial(beta.target()->face_count(), Rational(0)));
        for (const auto& e : one) CHECK(e == 0);
    }

    TEST_CASE("two single blowups compose to the two-step program") {
        std::vector<Variable> v = xx();
        Variable y{"y"};
        y.face = "bf";
        v.push_back(y);
        BlowupCenter c1{"A", {"x", "x'"}, {}, "A"}, c2{"B", {"A", "y"}, {}, "B"};
        auto [s2, direct] = run_program("two", v, {c1, c2});
        auto [s1, b1] = run_program("one", v, {c1});
        auto [t2, b2] = blow_up(s1, c2);
        BMap comp = compose_bmaps(b1, b2);
        CHECK(comp.matrix() == direct.matrix());
        CHECK(compose_bmaps(identity_bmap(s1), b2).matrix() == b2.matrix());
    }

    TEST_CASE("containment rule on every catalog blowdown") {
        for (const auto& [name, sp] : catalog().spaces) {
            if (sp->program().empty()) continue;
            BMap beta = direct_blowdown(sp);
            for (const Variable* v : sp->boundary_generators()) {
                Monomial m = lift_monomial(beta, monomial_from(*beta.target(), {{v->name, 1}}));
                Locus zero = close_locus({v->name}, {});
                for (std::size_t j = 0; j < sp->face_count(); ++j) {
                    const auto& F = sp->faces()[j];
                    Rational want = zero.implied_by(F.condition) ? Rational(v->weight, F.weight) : Rational(0);
                    INFO(name << ": " << v->name << " at " << F.label);
                    CHECK(m[j] == want);
                }
            }
        }
    }

    TEST_CASE("functoriality along the triple blowdowns") {
        const Catalog& c = catalog();
        BMap chain = compose_bmaps(c.map("beta_1"), compose_bmaps(c.map("beta_2"), c.map("beta_3")));
        const BMap& tr = c.map("beta_Tr");
        CHECK(chain.matrix() == tr.matrix());
        std::mt19937 rng(11);
        std::uniform_int_distribution<int> e(-3, 3);
        for (int k = 0; k < 50; ++k) {
            Monomial m(tr.target()->face_count());
            for (auto& x : m) x = Rational(e(rng), 2);
            Monomial step = lift_monomial(c.map("beta_1"), m);
            step = lift_monomial(c.map("beta_2"), step);
            step = lift_monomial(c.map("beta_3"), step);
            CHECK(step == lift_monomial(tr, m));
        }
    }

    TEST_CASE("lifts of x and t' along beta_Tr") {
        const BMap& tr = catalog().map("beta_Tr");
        const auto& S = *tr.source();
        CHECK(format_monomial(S, lift_monomial(tr, monomial_from(*tr.target(), {{"x", 1}}))) ==
              "rho_100*rho_111*rho_101*rho_110*rho_O*rho_101sc*rho_110sc");
        Monomial t = lift_monomial(tr, monomial_from(*tr.target(), {{"t'", 1}}));
        for (const char* f : {"tau1", "tauO"}) CHECK(t[S.face_index(f)] == 1);
        for (const char* f : {"110", "110sc", "101", "101sc", "111", "O"}) CHECK(t[S.face_index(f)] == 2);
        for (const char* f : {"100", "010", "001", "011", "011sc", "tau2"}) CHECK(t[S.face_index(f)] == 0);
    }

    TEST_CASE("golden tables") {
        int decisive = 0;
        for (const char* id : {"def-triple", "eq-0.3", "tlifts", "eq-05"}) {
            GoldenReport r = check_golden(load_golden(golden_path(id)), catalog());
            INFO(id);
            CHECK(r.pass());
            for (const auto& o : r.outcomes) decisive += o.flagged ? 0 : 1;
        }
        CHECK(decisive >= 3 + 12 + 3 + 2);
    }

    TEST_CASE("b-fibration certificates") {
        const Catalog& c = catalog();
        CHECK(certify_b_fibration(c.map("Pi_C")).verdict == FibrationVerdict::b_fibration);
        CHECK(certify_b_fibration(identity_bmap(c.space("M2b"))).verdict == FibrationVerdict::b_fibration);
        auto bb = certify_b_fibration(c.map("beta_b"));
        CHECK(bb.verdict != FibrationVerdict::b_fibration);
        CHECK_FALSE(bb.column_condition);

        // a source face feeding two target faces
        SpacePtr sq = base_space(*c.space("M2b"));
        BMap bad("bad", sq, sq, {{Rational(1), Rational(1)}, {Rational(0), Rational(1)}});
        auto cert = certify_b_fibration(bad);
        CHECK_FALSE(cert.column_condition);
        REQUIRE(cert.witnesses.size() == 1);
        CHECK(cert.witnesses[0].second.size() == 2);
    }

    TEST_CASE("projection square of identities") {
        SpacePtr sq = base_space(*catalog().space("M2b"));
        BMap id = identity_bmap(sq);
        BaseProjection pi;
        pi.pullback["x"] = {{{"x", 1}}};
        pi.pullback["x'"] = {{{"x'", 1}}};
        BMap got = solve_projection_lift("id", id, id, pi);
        CHECK(got.matrix() == id.matrix());
    }

    TEST_CASE("Pi_C lifts") {
        const BMap& pc = catalog().map("Pi_C");
        Monomial m = lift_monomial(pc, monomial_from(*pc.target(), {{"11sc", 1}}));
        CHECK(format_monomial(*pc.source(), m) == "rho_O*rho_101sc");
        Monomial t = lift_monomial(pc, monomial_from(*pc.target(), {{"tau", 1}}));
        CHECK(format_monomial(*pc.source(), t) == "rho_tauO");
    }

    TEST_CASE("face lattice") {
        const Catalog& c = catalog();
        auto nodes = [](const std::string& svg) {
            static const std::regex face("class=\"face\"");
            return std::distance(std::sregex_iterator(svg.begin(), svg.end(), face), std::sregex_iterator());
        };
        std::string m2b = emit_face_lattice(*c.space("M2b"));
        CHECK(nodes(m2b) == 3);
        CHECK(face_adjacency(*c.space("M2b")).size() == 2);  // lf and rf only meet through ff
        CHECK(nodes(emit_face_lattice(*c.space("HM3phi"))) == 14);
        CHECK(emit_face_lattice(*c.space("HM3phi")) == emit_face_lattice(*c.space("HM3phi")));

        auto [flat, b] = run_program("quarter", xx(), {});
        CHECK(nodes(emit_face_lattice(*flat)) == 2);
        CHECK(face_adjacency(*flat).size() == 1);
    }

    TEST_CASE("program errors") {
        CHECK_THROWS_AS(run_program("bad", xx(), {BlowupCenter{"c", {"w"}, {}, "c"}}), GeometryError);
        CHECK_THROWS_AS(catalog().space("nope"), std::exception);
    }
}
