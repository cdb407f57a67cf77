#pragma once

#include "phicalc/corner.hpp"

#include <json.hpp>

#include <initializer_list>
#include <stdexcept>
#include <string>

namespace phicalc {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kSchemaVersion = 1;

// parse text; syntax errors report line and column
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// strict mode: every key must be listed; `where` is a field path like "program[2]"
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where);
void check_schema_version(const nlohmann::json& j, const std::string& where);

Rational json_rational(const nlohmann::json& v, const std::string& where);
std::map<std::string, Rational> json_named_rationals(const nlohmann::json& j, const std::string& where);
nlohmann::json rational_json(const Rational& r);  // integer when possible, else "p/q"

struct ProgramSpec {
    std::string name;
    std::vector<Variable> variables;
    std::vector<BlowupCenter> program;
};

ProgramSpec parse_program(const nlohmann::json& j, const std::string& where = "space");
nlohmann::json program_json(const ProgramSpec& p);

}  // namespace phicalc
