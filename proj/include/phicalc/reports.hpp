#pragma once

#include "phicalc/index.hpp"
#include "phicalc/json_io.hpp"
#include "phicalc/kernels.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace phicalc {

// {schema_version, b, f, circumferences}
ModelGeometry parse_geometry(const nlohmann::json& j, const std::string& where = "geometry");
nlohmann::json geometry_json(const ModelGeometry& g);

// {schema_version, space, sets: {face: [[num, den, p], ...] | "infinite"}}
IndexFamily parse_index_family(const nlohmann::json& j, const std::string& where = "family");
nlohmann::json index_family_json(const IndexFamily& f);

struct Scenario {
    std::string name;
    // catalog space names or inline programs
    std::vector<std::variant<std::string, ProgramSpec>> spaces;
    ModelGeometry geometry{1, 1, {2 * 3.14159265358979323846}};
    std::vector<std::string> suites;
    std::string output_dir;
    std::string golden_dir;  // empty: the shipped fixtures
};

Scenario parse_scenario(const nlohmann::json& j, const std::string& origin = "scenario");
Scenario load_scenario(const std::string& path);

const std::vector<std::string>& known_suites();

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string id;
    std::vector<Check> checks;
    nlohmann::json data;  // suite specific numbers
    std::string csv;
    bool pass() const;
};

SuiteResult run_suite(const std::string& id, const Scenario& s);

struct ScenarioOutcome {
    int exit_code = 0;  // 0 pass, 1 check failure
    std::vector<std::string> failures;  // "suite: check (detail)"
    std::vector<SuiteResult> suites;
    std::vector<std::string> written;   // files, relative to output_dir
};

ScenarioOutcome run_scenario(const Scenario& s);

// one node per face, edges where the faces still meet after the whole program
std::vector<std::pair<std::size_t, std::size_t>> face_adjacency(const CornerSpace& s);
std::string emit_face_lattice(const CornerSpace& s);

SpacePtr build_space(const std::variant<std::string, ProgramSpec>& entry);

}  // namespace phicalc
