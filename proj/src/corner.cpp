#include "phicalc/corner.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace phicalc {

namespace {

std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// tiny union-find over names
struct Classes {
    std::map<std::string, std::string> parent;
    std::string find(const std::string& a) {
        auto it = parent.find(a);
        if (it == parent.end()) { parent[a] = a; return a; }
        if (it->second == a) return a;
        std::string r = find(it->second);
        parent[a] = r;
        return r;
    }
    bool unite(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
        return true;
    }
};

}  // namespace

bool Locus::implied_by(const Locus& o) const {
    for (const auto& v : vanishing)
        if (!o.vanishing.count(v)) return false;
    for (const auto& p : ids) {
        if (o.ids.count(p)) continue;
        if (o.vanishing.count(p.first) && o.vanishing.count(p.second)) continue;
        return false;
    }
    return true;
}

Locus close_locus(const std::set<std::string>& vanishing,
                  const std::vector<std::pair<std::string, std::string>>& ids) {
    Classes uf;
    for (const auto& [a, b] : ids) uf.unite(a, b);
    std::map<std::string, std::vector<std::string>> cls;
    for (const auto& kv : uf.parent) cls[uf.find(kv.first)].push_back(kv.first);
    Locus l;
    l.vanishing = vanishing;
    for (auto& [root, members] : cls) {
        (void)root;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t k = i + 1; k < members.size(); ++k)
                l.ids.insert(ordered(members[i], members[k]));
    }
    return l;
}

struct SpaceBuilder {
    static CornerSpace& mut(CornerSpace& s) { return s; }
    static void add_face(CornerSpace& s, BoundaryFace f) { s.faces_.push_back(std::move(f)); }
    static void add_center(CornerSpace& s, BlowupCenter c) { s.program_.push_back(std::move(c)); }
    static void rename(CornerSpace& s, std::string n) { s.name_ = std::move(n); }
};

CornerSpace::CornerSpace(std::string name, std::vector<Variable> variables)
    : name_(std::move(name)), variables_(std::move(variables)) {
    std::set<std::string> seen;
    for (auto& v : variables_) {
        if (v.name.empty()) throw GeometryError("empty variable name");
        if (!seen.insert(v.name).second) throw GeometryError("duplicate variable '" + v.name + "'");
        if (v.weight != 1 && v.weight != 2)
            throw GeometryError("variable '" + v.name + "' has weight outside {1,2}");
        if (v.face.empty()) v.face = v.name;
    }
    std::set<std::string> labels;
    for (const auto& v : variables_) {
        if (!v.boundary) continue;
        if (!labels.insert(v.face).second) throw GeometryError("duplicate face label '" + v.face + "'");
        BoundaryFace f;
        f.label = v.face;
        f.origin = v.name;
        f.weight = v.weight;
        f.condition.vanishing = {v.name};
        faces_.push_back(std::move(f));
    }
}

std::optional<std::size_t> CornerSpace::find_face(const std::string& label) const {
    for (std::size_t i = 0; i < faces_.size(); ++i)
        if (faces_[i].label == label) return i;
    return std::nullopt;
}

std::size_t CornerSpace::face_index(const std::string& label) const {
    auto i = find_face(label);
    if (!i) throw GeometryError("space '" + name_ + "' has no face '" + label + "'");
    return *i;
}

const Variable* CornerSpace::find_variable(const std::string& n) const {
    for (const auto& v : variables_)
        if (v.name == n) return &v;
    return nullptr;
}

std::vector<const Variable*> CornerSpace::boundary_generators() const {
    std::vector<const Variable*> out;
    for (const auto& v : variables_)
        if (v.boundary) out.push_back(&v);
    return out;
}

Locus CornerSpace::center_locus(const BlowupCenter& c) const {
    if (c.vanishing.empty()) throw GeometryError("center '" + c.id + "' has empty vanishing set");
    std::set<std::string> raw;
    std::set<std::string> van;
    std::vector<std::pair<std::string, std::string>> ids;
    for (const auto& s : c.vanishing) {
        if (!raw.insert(s).second)
            throw GeometryError("center '" + c.id + "': '" + s + "' listed twice");
        if (find_variable(s)) {
            van.insert(s);
        } else if (auto fi = find_face(s)) {
            const auto& cond = faces_[*fi].condition;
            van.insert(cond.vanishing.begin(), cond.vanishing.end());
            ids.insert(ids.end(), cond.ids.begin(), cond.ids.end());
        } else {
            throw GeometryError("center '" + c.id + "': unknown symbol '" + s + "'");
        }
    }
    Classes uf;
    for (const auto& [a, b] : c.identifications) {
        const Variable* va = find_variable(a);
        const Variable* vb = find_variable(b);
        if (!va || !vb)
            throw GeometryError("center '" + c.id + "': unknown symbol '" + (va ? b : a) + "'");
        if (va->kind != vb->kind || va->weight != vb->weight)
            throw GeometryError("center '" + c.id + "': identification " + a + "=" + b +
                                " mixes variable kinds");
        if (van.count(a) && van.count(b))
            throw GeometryError("center '" + c.id + "': identification " + a + "=" + b +
                                " is implied by the vanishing set");
        if (!uf.unite(a, b))
            throw GeometryError("center '" + c.id + "': identification " + a + "=" + b +
                                " is dependent on the others");
    }
    ids.insert(ids.end(), c.identifications.begin(), c.identifications.end());
    return close_locus(van, ids);
}

std::vector<std::size_t> CornerSpace::maximal_containing_faces(const Locus& l) const {
    std::vector<std::size_t> cont;
    for (std::size_t i = 0; i < faces_.size(); ++i)
        if (faces_[i].condition.implied_by(l)) cont.push_back(i);
    std::vector<std::size_t> out;
    for (auto i : cont) {
        bool dominated = false;
        for (auto k : cont) {
            if (k == i) continue;
            const auto& ci = faces_[i].condition;
            const auto& ck = faces_[k].condition;
            if (ci.implied_by(ck) && !(ci == ck)) { dominated = true; break; }
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

bool CornerSpace::same_layout(const CornerSpace& o) const {
    if (faces_.size() != o.faces_.size()) return false;
    for (std::size_t i = 0; i < faces_.size(); ++i)
        if (faces_[i].label != o.faces_[i].label || faces_[i].weight != o.faces_[i].weight) return false;
    return true;
}

BMap::BMap(std::string name, SpacePtr source, SpacePtr target, std::vector<std::vector<Rational>> alpha)
    : name_(std::move(name)), source_(std::move(source)), target_(std::move(target)), alpha_(std::move(alpha)) {
    if (alpha_.size() != target_->face_count())
        throw GeometryError("bmap '" + name_ + "': row count does not match target faces");
    for (const auto& row : alpha_) {
        if (row.size() != source_->face_count())
            throw GeometryError("bmap '" + name_ + "': column count does not match source faces");
        for (const auto& a : row)
            if (a < 0) throw GeometryError("bmap '" + name_ + "': negative exponent");
    }
    smooth_positive.assign(target_->face_count(), true);
}

std::pair<SpacePtr, BMap> blow_up(const SpacePtr& space, const BlowupCenter& c) {
    Locus l = space->center_locus(c);
    std::string label = c.label.empty() ? c.id : c.label;
    if (space->find_face(label)) throw GeometryError("center '" + c.id + "': face label '" + label + "' already used");
    for (const auto& f : space->faces())
        if (f.condition == l) throw GeometryError("center '" + c.id + "' coincides with face '" + f.label + "'");

    int w = 0;
    for (const auto& v : l.vanishing) {
        const Variable* var = space->find_variable(v);
        if (var->boundary) w = w == 0 ? var->weight : std::min(w, var->weight);
    }
    if (w == 0) w = 1;

    auto containing = space->maximal_containing_faces(l);
    if (containing.empty() && c.requires_face)
        throw GeometryError("degenerate blowup: center '" + c.id + "' lies in no boundary face");

    auto next = std::make_shared<CornerSpace>(*space);
    BoundaryFace f;
    f.label = label;
    f.origin = c.id;
    f.weight = w;
    f.condition = l;
    SpaceBuilder::add_face(*next, f);
    SpaceBuilder::add_center(*next, c);
    SpaceBuilder::rename(*next, space->name() + "+" + label);

    std::size_t n = space->face_count();
    std::vector<std::vector<Rational>> alpha(n, std::vector<Rational>(n + 1, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) alpha[i][i] = 1;
    for (auto i : containing) alpha[i][n] = Rational(space->faces()[i].weight, w);
    SpacePtr src = next;
    BMap m("blowdown[" + label + "]", src, space, std::move(alpha));
    return {src, std::move(m)};
}

BMap identity_bmap(const SpacePtr& space) {
    std::size_t n = space->face_count();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) a[i][i] = 1;
    BMap m("id[" + space->name() + "]", space, space, std::move(a));
    m.b_submersion_declared = true;
    return m;
}

BMap compose_bmaps(const BMap& outer, const BMap& inner) {
    if (!inner.target()->same_layout(*outer.source()))
        throw GeometryError("compose: '" + inner.name() + "' lands in '" + inner.target()->name() +
                            "' but '" + outer.name() + "' starts from '" + outer.source()->name() + "'");
    std::size_t I = outer.target()->face_count();
    std::size_t K = outer.source()->face_count();
    std::size_t J = inner.source()->face_count();
    std::vector<std::vector<Rational>> a(I, std::vector<Rational>(J, Rational(0)));
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t k = 0; k < K; ++k) {
            if (outer.at(i, k) == 0) continue;
            for (std::size_t j = 0; j < J; ++j) a[i][j] += outer.at(i, k) * inner.at(k, j);
        }
    BMap m(outer.name() + "*" + inner.name(), inner.source(), outer.target(), std::move(a));
    for (std::size_t i = 0; i < I; ++i) {
        bool ok = outer.smooth_positive[i];
        for (std::size_t k = 0; k < K; ++k)
            if (outer.at(i, k) != 0) ok = ok && inner.smooth_positive[k];
        m.smooth_positive[i] = ok;
    }
    m.b_submersion_declared = outer.b_submersion_declared && inner.b_submersion_declared;
    return m;
}

SpacePtr base_space(const CornerSpace& space) {
    return std::make_shared<CornerSpace>(space.name() + "/base", space.variables());
}

BMap direct_blowdown(const SpacePtr& space) {
    SpacePtr base = base_space(*space);
    std::size_t I = base->face_count(), J = space->face_count();
    std::vector<std::vector<Rational>> a(I, std::vector<Rational>(J, Rational(0)));
    for (std::size_t i = 0; i < I; ++i) {
        const std::string& v = base->faces()[i].origin;
        int wv = base->faces()[i].weight;
        for (std::size_t j = 0; j < J; ++j) {
            const auto& F = space->faces()[j];
            if (F.condition.vanishing.count(v)) a[i][j] = Rational(wv, F.weight);
        }
    }
    return BMap("direct[" + space->name() + "]", space, base, std::move(a));
}

std::pair<SpacePtr, BMap> extend_program(const SpacePtr& start, const std::vector<BlowupCenter>& centers,
                                         const std::string& name) {
    SpacePtr cur = start;
    BMap total = identity_bmap(start);
    for (const auto& c : centers) {
        auto [next, step] = blow_up(cur, c);
        total = compose_bmaps(total, step);
        cur = next;
    }
    auto named = std::make_shared<CornerSpace>(*cur);
    SpaceBuilder::rename(*named, name);
    SpacePtr out = named;
    BMap bd("blowdown[" + name + "]", out, start, total.matrix());
    bd.b_submersion_declared = true;
    return {out, std::move(bd)};
}

std::pair<SpacePtr, BMap> run_program(const std::string& name, std::vector<Variable> vars,
                                      const std::vector<BlowupCenter>& program) {
    auto base = std::make_shared<const CornerSpace>(name + "/base", std::move(vars));
    return extend_program(base, program, name);
}

Monomial lift_monomial(const BMap& map, const Monomial& m) {
    if (m.size() != map.target()->face_count())
        throw GeometryError("lift along '" + map.name() + "': monomial has wrong length");
    Monomial out(map.source()->face_count(), Rational(0));
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += m[i] * map.at(i, j);
    }
    return out;
}

Monomial monomial_from(const CornerSpace& s, const std::map<std::string, Rational>& named) {
    Monomial m(s.face_count(), Rational(0));
    for (const auto& [k, e] : named) {
        std::optional<std::size_t> i = s.find_face(k);
        if (!i) {
            // allow generator names for their zero faces
            const Variable* v = s.find_variable(k);
            if (v && v->boundary) i = s.find_face(v->face);
        }
        if (!i) throw GeometryError("space '" + s.name() + "' has no face or generator '" + k + "'");
        m[*i] += e;
    }
    return m;
}

std::string format_monomial(const CornerSpace& s, const Monomial& m, const std::string& prefix) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (!first) os << '*';
        first = false;
        os << prefix << s.faces()[i].label;
        if (m[i] != 1) os << '^' << (m[i].denominator() == 1 ? to_string(m[i]) : "(" + to_string(m[i]) + ")");
    }
    return first ? "1" : os.str();
}

FibrationCertificate certify_b_fibration(const BMap& map) {
    FibrationCertificate c;
    const auto& S = *map.source();
    const auto& T = *map.target();
    for (std::size_t j = 0; j < S.face_count(); ++j) {
        std::vector<std::string> hits;
        for (std::size_t i = 0; i < T.face_count(); ++i) {
            if (map.at(i, j) < 0) c.nonnegative = false;
            if (map.at(i, j) != 0) hits.push_back(T.faces()[i].label);
        }
        if (hits.size() > 1) {
            c.column_condition = false;
            c.witnesses.emplace_back(S.faces()[j].label, hits);
        }
    }
    if (!c.nonnegative) return c;
    if (c.column_condition && map.b_submersion_declared) c.verdict = FibrationVerdict::b_fibration;
    else if (map.b_submersion_declared) c.verdict = FibrationVerdict::b_submersion_assumed;
    else c.verdict = FibrationVerdict::b_map;
    return c;
}

std::string to_string(FibrationVerdict v) {
    switch (v) {
        case FibrationVerdict::b_map: return "b-map";
        case FibrationVerdict::b_submersion_assumed: return "b-submersion assumed";
        case FibrationVerdict::b_fibration: return "b-fibration";
    }
    return "?";
}

Monomial lift_posynomial(const BMap& map, const std::vector<std::map<std::string, Rational>>& terms) {
    if (terms.empty()) throw GeometryError("empty sum of monomials");
    std::optional<Monomial> acc;
    for (const auto& t : terms) {
        Monomial l = lift_monomial(map, monomial_from(*map.target(), t));
        if (!acc) { acc = l; continue; }
        for (std::size_t j = 0; j < l.size(); ++j) (*acc)[j] = std::min((*acc)[j], l[j]);
    }
    return *acc;
}

namespace {

// exact least squares is not needed: we require a unique exact solution
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> A,
                                                 std::vector<Rational> b, bool& underdetermined) {
    std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    std::size_t r = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && A[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(A[p], A[r]);
        std::swap(b[p], b[r]);
        for (std::size_t k = 0; k < rows; ++k) {
            if (k == r || A[k][c] == 0) continue;
            Rational f = A[k][c] / A[r][c];
            for (std::size_t q = c; q < cols; ++q) A[k][q] -= f * A[r][q];
            b[k] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t k = r; k < rows; ++k)
        if (b[k] != 0) return std::nullopt;
    underdetermined = r < cols;
    if (underdetermined) return std::nullopt;
    std::vector<Rational> x(cols, Rational(0));
    for (std::size_t k = 0; k < r; ++k) x[pivot_col[k]] = b[k] / A[k][pivot_col[k]];
    return x;
}

}  // namespace

BMap solve_projection_lift(const std::string& name, const BMap& src_bd, const BMap& tgt_bd,
                           const BaseProjection& pi) {
    const CornerSpace& S = *src_bd.source();
    const CornerSpace& T = *tgt_bd.source();
    const CornerSpace& Tb = *tgt_bd.target();
    const CornerSpace& Sb = *src_bd.target();

    std::vector<std::string> tvars;
    for (const auto& f : Tb.faces()) {
        if (!pi.pullback.count(f.origin))
            throw GeometryError("projection '" + name + "': no pullback given for '" + f.origin + "'");
        tvars.push_back(f.origin);
    }

    std::vector<std::vector<Rational>> alpha(T.face_count(), std::vector<Rational>(S.face_count(), Rational(0)));
    for (std::size_t j = 0; j < S.face_count(); ++j) {
        const auto& F = S.faces()[j];
        const Locus& cl = F.condition;

        std::vector<Rational> rhs;
        std::set<std::string> image;
        for (const auto& v : tvars) {
            const auto& terms = pi.pullback.at(v);
            Rational best = 0;
            bool first = true, vanishes = true;
            for (const auto& t : terms) {
                Rational e = 0;
                bool hit = false;
                for (const auto& [u, p] : t) {
                    auto ui = Sb.find_face(Sb.find_variable(u) ? Sb.find_variable(u)->face : u);
                    if (!ui) throw GeometryError("projection '" + name + "': unknown source variable '" + u + "'");
                    e += p * src_bd.at(*ui, j);
                    if (p > 0 && cl.vanishing.count(u)) hit = true;
                }
                if (!hit) vanishes = false;
                best = first ? e : std::min(best, e);
                first = false;
            }
            rhs.push_back(best);
            if (vanishes) image.insert(v);
        }
        std::vector<std::pair<std::string, std::string>> ids;
        for (const auto& [a, b] : cl.ids) {
            auto ia = pi.rename.find(a), ib = pi.rename.find(b);
            if (ia != pi.rename.end() && ib != pi.rename.end()) ids.emplace_back(ia->second, ib->second);
        }
        Locus img = close_locus(image, ids);
        auto cand = T.maximal_containing_faces(img);

        if (cand.empty()) {
            for (std::size_t k = 0; k < rhs.size(); ++k)
                if (rhs[k] != 0)
                    throw GeometryError("projection '" + name + "': face '" + F.label +
                                        "' lies over the interior but lifts '" + tvars[k] + "' nontrivially");
            continue;
        }
        std::vector<std::vector<Rational>> A(tvars.size(), std::vector<Rational>(cand.size()));
        for (std::size_t k = 0; k < tvars.size(); ++k)
            for (std::size_t c = 0; c < cand.size(); ++c) A[k][c] = tgt_bd.at(k, cand[c]);
        bool under = false;
        auto x = solve_exact(A, rhs, under);
        if (!x) {
            throw GeometryError("projection '" + name + "': " +
                                std::string(under ? "underdetermined" : "inconsistent") +
                                " exponent system at source face '" + F.label + "'");
        }
        for (std::size_t c = 0; c < cand.size(); ++c) {
            if ((*x)[c] < 0)
                throw GeometryError("projection '" + name + "': negative exponent at source face '" + F.label + "'");
            alpha[cand[c]][j] = (*x)[c];
        }
    }
    return BMap(name, src_bd.source(), tgt_bd.source(), std::move(alpha));
}

bool separated_after(const CornerSpace& s, const BlowupCenter& parent, const BlowupCenter& a,
                     const BlowupCenter& b) {
    Locus P = s.center_locus(parent), A = s.center_locus(a), B = s.center_locus(b);
    std::set<std::string> van = A.vanishing;
    van.insert(B.vanishing.begin(), B.vanishing.end());
    std::vector<std::pair<std::string, std::string>> ids(A.ids.begin(), A.ids.end());
    ids.insert(ids.end(), B.ids.begin(), B.ids.end());
    Locus AB = close_locus(van, ids);
    return P.implied_by(AB) && !P.implied_by(A) && !P.implied_by(B);
}

}  // namespace phicalc
