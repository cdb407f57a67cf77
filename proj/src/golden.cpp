#include "phicalc/golden.hpp"

#include "phicalc/json_io.hpp"

#include <set>

namespace phicalc {

using nlohmann::json;

GoldenTable load_golden(const std::string& path) {
    json j = read_json_file(path);
    check_keys(j, {"schema_version", "id", "equation", "map", "entries"}, path);
    check_schema_version(j, path);
    GoldenTable t;
    t.id = j.value("id", "");
    t.equation = j.value("equation", "");
    std::string default_map = j.value("map", "");
    if (!j.contains("entries") || !j["entries"].is_array()) throw SchemaError(path + ".entries: expected array");
    std::size_t k = 0;
    for (const auto& e : j["entries"]) {
        std::string w = path + ".entries[" + std::to_string(k++) + "]";
        check_keys(e, {"map", "lift", "sum", "expected", "symmetric_variant", "aliases", "flagged", "note"}, w);
        GoldenEntry g;
        g.map = e.value("map", default_map);
        if (g.map.empty()) throw SchemaError(w + ".map: missing");
        if (e.contains("lift") == e.contains("sum")) throw SchemaError(w + ": need exactly one of lift/sum");
        if (e.contains("lift")) g.terms.push_back(json_named_rationals(e["lift"], w + ".lift"));
        else
            for (const auto& s : e["sum"]) g.terms.push_back(json_named_rationals(s, w + ".sum"));
        if (!e.contains("expected")) throw SchemaError(w + ".expected: missing");
        g.expected = json_named_rationals(e["expected"], w + ".expected");
        if (e.contains("symmetric_variant"))
            g.symmetric_variant = json_named_rationals(e["symmetric_variant"], w + ".symmetric_variant");
        if (e.contains("aliases"))
            for (auto it = e["aliases"].begin(); it != e["aliases"].end(); ++it)
                g.aliases[it.key()] = it.value().get<std::string>();
        g.flagged = e.value("flagged", false);
        g.note = e.value("note", "");
        t.entries.push_back(std::move(g));
    }
    return t;
}

std::string golden_path(const std::string& id, const std::string& dir) {
    std::string d = dir.empty() ? std::string(PHICALC_FIXTURE_DIR) + "/golden" : dir;
    return d + "/" + id + ".json";
}

bool GoldenReport::pass() const {
    for (const auto& o : outcomes)
        if (!o.flagged && !o.pass) return false;
    return true;
}

namespace {

std::string term_string(const std::vector<NamedExponents>& terms) {
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) s += " + ";
        bool first = true;
        for (const auto& [k, v] : terms[i]) {
            if (!first) s += "*";
            first = false;
            s += k;
            if (v != 1) s += "^" + to_string(v);
        }
    }
    return s;
}

}  // namespace

GoldenReport check_golden(const GoldenTable& t, const Catalog& c, bool use_symmetric) {
    GoldenReport r;
    r.id = t.id;
    for (const auto& e : t.entries) {
        GoldenOutcome o;
        o.map = e.map;
        o.lift = term_string(e.terms);
        o.flagged = e.flagged;
        o.note = e.note;
        const BMap& m = c.map(e.map);
        const CornerSpace& S = *m.source();
        Monomial got = e.terms.size() == 1 ? lift_monomial(m, monomial_from(*m.target(), e.terms[0]))
                                           : lift_posynomial(m, e.terms);
        const NamedExponents& want_named =
            (use_symmetric && e.symmetric_variant) ? *e.symmetric_variant : e.expected;
        Monomial want(S.face_count(), Rational(0));
        bool unknown_face = false;
        for (const auto& [label, v] : want_named) {
            auto a = e.aliases.find(label);
            auto idx = S.find_face(a == e.aliases.end() ? label : a->second);
            if (!idx) {
                o.mismatched_faces.push_back(label + " (not a face of " + S.name() + ")");
                unknown_face = true;
                continue;
            }
            want[*idx] += v;
        }
        for (std::size_t f = 0; f < S.face_count(); ++f)
            if (got[f] != want[f])
                o.mismatched_faces.push_back(S.faces()[f].label + ": expected " + to_string(want[f]) + ", got " +
                                             to_string(got[f]));
        o.pass = !unknown_face && o.mismatched_faces.empty();
        o.computed = format_monomial(S, got);
        o.expected = format_monomial(S, want);
        r.outcomes.push_back(std::move(o));
    }
    return r;
}

}  // namespace phicalc
