#include "phicalc/catalog.hpp"
#include "phicalc/golden.hpp"
#include "phicalc/reports.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace phicalc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / ("phicalc-tests-" + std::to_string(::getpid())) / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// copy of the shipped goldens with the x'' row's exponent at 001 changed to 2
fs::path perturbed_goldens() {
    fs::path dir = scratch("goldens");
    for (const auto& e : fs::directory_iterator(std::string(PHICALC_FIXTURE_DIR) + "/golden"))
        fs::copy_file(e.path(), dir / e.path().filename());
    json j = read_json_file((dir / "def-triple.json").string());
    j["entries"][2]["expected"]["001"] = "2";
    write_text_file((dir / "def-triple.json").string(), j.dump(2));
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(PHICALC_CLI) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Scenario quick(const std::string& out) {
    Scenario s;
    s.name = "quick";
    s.spaces = {std::string("M2b"), std::string("HM3phi")};
    s.suites = {"def-triple", "eq-0.3", "tlifts", "eq-05", "ledger", "fd-normal"};
    s.output_dir = out;
    return s;
}

}  // namespace

TEST_SUITE("reports") {
    TEST_CASE("scenario schema") {
        json ok = {{"schema_version", 1}, {"name", "x"}, {"suites", {"def-triple"}}};
        CHECK(parse_scenario(ok).suites.size() == 1);

        auto bad = [&](json j) { CHECK_THROWS_AS(parse_scenario(j, "s.json"), SchemaError); };
        json typo = ok;
        typo["suite"] = json::array();
        bad(typo);
        json ver = ok;
        ver["schema_version"] = 99;
        bad(ver);
        json nover = ok;
        nover.erase("schema_version");
        bad(nover);
        json suite = ok;
        suite["suites"] = {"def-triple", "nope"};
        bad(suite);
        json space = ok;
        space["spaces"] = {"M9"};
        bad(space);
        json noname = ok;
        noname.erase("name");
        bad(noname);

        try {
            parse_scenario(suite, "s.json");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find("suites[1]") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_json_text("{\"a\": 1,\n  ]", "broken.json"), SchemaError);
    }

    TEST_CASE("geometry and index family round trips") {
        ModelGeometry g{1, 2, {1.5, 2.5}};
        ModelGeometry h = parse_geometry(geometry_json(g));
        CHECK(h.b == 1);
        CHECK(h.circumferences == g.circumferences);
        CHECK_THROWS_AS(parse_geometry(json{{"schema_version", 1}, {"b", 0}, {"f", 1}, {"circumferences", json::array()}}),
                        SchemaError);

        IndexFamily f = uniform_family(catalog().space("M2b"), IndexSet::infinite());
        f.sets["ff"] = IndexSet::from({{Rational(1, 2), 1}, {Rational(2, 3), 0}});
        IndexFamily r = parse_index_family(index_family_json(f));
        for (const auto& face : r.space->faces()) CHECK(r.at(face.label) == f.at(face.label));
        json missing = index_family_json(f);
        missing["sets"].erase("lf");
        CHECK_THROWS_AS(parse_index_family(missing), SchemaError);
    }

    TEST_CASE("def-triple alone exits 0") {
        Scenario s;
        s.name = "def";
        s.suites = {"def-triple"};
        ScenarioOutcome o = run_scenario(s);
        CHECK(o.exit_code == 0);
        CHECK(o.failures.empty());
    }

    TEST_CASE("empty suite list") {
        Scenario s;
        s.name = "empty";
        s.output_dir = scratch("empty").string();
        ScenarioOutcome o = run_scenario(s);
        CHECK(o.exit_code == 0);
        CHECK(o.written == std::vector<std::string>{"summary.json"});
    }

    TEST_CASE("perturbed golden exits 1 naming the face") {
        Scenario s;
        s.name = "perturbed";
        s.suites = {"def-triple", "tlifts"};
        s.golden_dir = perturbed_goldens().string();
        ScenarioOutcome o = run_scenario(s);
        CHECK(o.exit_code == 1);
        REQUIRE(o.failures.size() == 1);
        CHECK(o.failures[0].find("def-triple") == 0);
        CHECK(o.failures[0].find("001") != std::string::npos);
    }

    TEST_CASE("reports are byte stable") {
        fs::path a = scratch("stable-a"), b = scratch("stable-b");
        auto oa = run_scenario(quick(a.string()));
        auto ob = run_scenario(quick(b.string()));
        CHECK(oa.exit_code == 0);
        REQUIRE(oa.written == ob.written);
        CHECK(oa.written.size() == 6 * 2 + 2 + 1);
        for (const auto& f : oa.written) {
            INFO(f);
            CHECK(slurp(a / f) == slurp(b / f));
        }
        json sum = read_json_file((a / "summary.json").string());
        CHECK(sum["exit_code"] == 0);
        CHECK(sum["spaces"][1]["faces"] == 14);
    }

    TEST_CASE("ledger suite") {
        SuiteResult r = run_suite("ledger", Scenario{});
        CHECK(r.pass());
        CHECK(r.data["cases"] == 81);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("exit codes") {
        fs::path out = scratch("cli");
        std::string scen = std::string(PHICALC_FIXTURE_DIR) + "/scenarios/def-triple.json";
        CHECK(run_cli("report all --scenario " + scen + " --out " + out.string()) == 0);
        CHECK(fs::exists(out / "def-triple.json"));
        CHECK(fs::exists(out / "lattice-HM3phi.svg"));
        CHECK(run_cli("") == 2);
        CHECK(run_cli("frobnicate") == 2);
        CHECK(run_cli("report all") == 2);

        write_text_file((out / "typo.json").string(), R"({"schema_version": 1, "name": "t", "suits": []})");
        CHECK(run_cli("report all --scenario " + (out / "typo.json").string()) == 2);

        json j = read_json_file(scen);
        j["golden_dir"] = perturbed_goldens().string();
        j["output_dir"] = (out / "perturbed").string();
        write_text_file((out / "perturbed.json").string(), j.dump());
        CHECK(run_cli("report all --scenario " + (out / "perturbed.json").string()) == 1);

        CHECK(run_cli("spaces certify --map Pi_C") == 0);
        CHECK(run_cli("spaces certify --map beta_b") == 1);
        CHECK(run_cli("spaces build --name HM3phi") == 0);
        CHECK(run_cli("index compose --a 3 --ell-a 0 --b 4") == 0);
        CHECK(run_cli("index compose --a 3 --b 4 --ell-b 0") == 2);
        CHECK(run_cli("volterra run --terms 9") == 2);
    }

    TEST_CASE("kernel eval writes one value per row") {
        fs::path out = scratch("cli-kernel");
        write_text_file((out / "grid.csv").string(), "tau,xp,a\n0.5,1,0.3\n0.2,0.5,0.1\n");
        std::string cmd = std::string(PHICALC_CLI) + " kernel eval --kernel exact --m 1 --chart fd --grid " +
                          (out / "grid.csv").string() + " > " + (out / "values.csv").string();
        REQUIRE(std::system(cmd.c_str()) == 0);
        std::string text = slurp(out / "values.csv");
        CHECK(text.rfind("tau,xp,a,value\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 3);
        write_text_file((out / "bad.csv").string(), "tau,xp\n1,2\n");
        CHECK(run_cli("kernel eval --grid " + (out / "bad.csv").string()) == 2);
    }
}
