#include "phicalc/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace phicalc {

using nlohmann::json;

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        std::size_t line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n');
        std::size_t last_nl = text.rfind('\n', pos ? pos - 1 : 0);
        std::size_t col = last_nl == std::string::npos ? pos : pos - last_nl - 1;
        throw SchemaError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": invalid JSON (" + e.what() + ")");
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
        if (!ok) throw SchemaError(where + "." + it.key() + ": unknown field");
    }
}

void check_schema_version(const json& j, const std::string& where) {
    if (!j.contains("schema_version")) throw SchemaError(where + ".schema_version: missing");
    const auto& v = j["schema_version"];
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
        throw SchemaError(where + ".schema_version: expected " + std::to_string(kSchemaVersion));
}

Rational json_rational(const json& v, const std::string& where) {
    try {
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
        throw SchemaError(where + ": " + e.what());
    }
    throw SchemaError(where + ": expected integer or \"p/q\" string");
}

std::map<std::string, Rational> json_named_rationals(const json& j, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object of exponents");
    std::map<std::string, Rational> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = json_rational(it.value(), where + "." + it.key());
    return out;
}

json rational_json(const Rational& r) {
    if (r.denominator() == 1) return r.numerator();
    return to_string(r);
}

namespace {

std::string need_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) throw SchemaError(where + "." + key + ": expected string");
    return j[key].get<std::string>();
}

}  // namespace

ProgramSpec parse_program(const json& j, const std::string& where) {
    check_keys(j, {"schema_version", "name", "generators", "program"}, where);
    check_schema_version(j, where);
    ProgramSpec p;
    p.name = j.contains("name") ? need_string(j, "name", where) : std::string("space");
    if (!j.contains("generators") || !j["generators"].is_array())
        throw SchemaError(where + ".generators: expected array");
    std::size_t k = 0;
    for (const auto& g : j["generators"]) {
        std::string w = where + ".generators[" + std::to_string(k++) + "]";
        check_keys(g, {"name", "kind", "weight", "face", "interior"}, w);
        Variable v;
        v.name = need_string(g, "name", w);
        std::string kind = g.contains("kind") ? need_string(g, "kind", w) : "spatial";
        if (kind == "spatial") v.kind = VariableKind::spatial;
        else if (kind == "temporal") v.kind = VariableKind::temporal;
        else throw SchemaError(w + ".kind: expected spatial|temporal");
        if (g.contains("weight")) {
            if (!g["weight"].is_number_integer()) throw SchemaError(w + ".weight: expected integer");
            v.weight = g["weight"].get<int>();
        }
        if (g.contains("face")) v.face = need_string(g, "face", w);
        if (g.contains("interior")) {
            if (!g["interior"].is_boolean()) throw SchemaError(w + ".interior: expected boolean");
            v.boundary = !g["interior"].get<bool>();
        }
        p.variables.push_back(v);
    }
    k = 0;
    if (j.contains("program")) {
        if (!j["program"].is_array()) throw SchemaError(where + ".program: expected array");
        for (const auto& c : j["program"]) {
            std::string w = where + ".program[" + std::to_string(k++) + "]";
            check_keys(c, {"id", "vanishing", "identifications", "label", "requires_face"}, w);
            BlowupCenter bc;
            bc.id = need_string(c, "id", w);
            bc.label = c.contains("label") ? need_string(c, "label", w) : bc.id;
            if (!c.contains("vanishing") || !c["vanishing"].is_array())
                throw SchemaError(w + ".vanishing: expected array");
            for (const auto& s : c["vanishing"]) {
                if (!s.is_string()) throw SchemaError(w + ".vanishing: expected strings");
                bc.vanishing.push_back(s.get<std::string>());
            }
            if (c.contains("identifications")) {
                for (const auto& pr : c["identifications"]) {
                    if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
                        throw SchemaError(w + ".identifications: expected [a, b] pairs");
                    bc.identifications.emplace_back(pr[0].get<std::string>(), pr[1].get<std::string>());
                }
            }
            if (c.contains("requires_face")) {
                if (!c["requires_face"].is_boolean()) throw SchemaError(w + ".requires_face: expected boolean");
                bc.requires_face = c["requires_face"].get<bool>();
            }
            p.program.push_back(bc);
        }
    }
    return p;
}

json program_json(const ProgramSpec& p) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = p.name;
    j["generators"] = json::array();
    for (const auto& v : p.variables) {
        json g = {{"name", v.name},
                  {"kind", v.kind == VariableKind::spatial ? "spatial" : "temporal"},
                  {"weight", v.weight}};
        if (!v.boundary) g["interior"] = true;
        else if (v.face != v.name) g["face"] = v.face;
        j["generators"].push_back(g);
    }
    j["program"] = json::array();
    for (const auto& c : p.program) {
        json e = {{"id", c.id}, {"vanishing", c.vanishing}, {"label", c.label}};
        if (!c.identifications.empty()) {
            e["identifications"] = json::array();
            for (const auto& [a, b] : c.identifications) e["identifications"].push_back({a, b});
        }
        if (c.requires_face) e["requires_face"] = true;
        j["program"].push_back(e);
    }
    return j;
}

}  // namespace phicalc
