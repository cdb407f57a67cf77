#pragma once

#include "phicalc/catalog.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phicalc {

using NamedExponents = std::map<std::string, Rational>;

struct GoldenEntry {
    std::string map;
    std::vector<NamedExponents> terms;  // one term = monomial, several = sum
    NamedExponents expected;
    std::optional<NamedExponents> symmetric_variant;
    std::map<std::string, std::string> aliases;  // printed label -> catalog face
    bool flagged = false;
    std::string note;
};

struct GoldenTable {
    std::string id;
    std::string equation;
    std::vector<GoldenEntry> entries;
};

GoldenTable load_golden(const std::string& path);
std::string golden_path(const std::string& id, const std::string& dir = "");

struct GoldenOutcome {
    std::string map, lift, computed, expected;
    bool pass = false;
    bool flagged = false;
    std::vector<std::string> mismatched_faces;
    std::string note;
};

struct GoldenReport {
    std::string id;
    std::vector<GoldenOutcome> outcomes;
    // flagged entries are reported but do not decide `pass`
    bool pass() const;
};

// use_symmetric: compare against the symmetric variant where the fixture has one
GoldenReport check_golden(const GoldenTable& t, const Catalog& c, bool use_symmetric = true);

}  // namespace phicalc
