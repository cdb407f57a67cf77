#include "phicalc/index.hpp"

#include "phicalc/catalog.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace phicalc {

namespace {

bool is_nat(const Rational& d) { return d.denominator() == 1 && d >= 0; }

}  // namespace

IndexSet IndexSet::from(std::vector<IndexPair> gens) {
    for (const auto& g : gens)
        if (g.p < 0) throw std::invalid_argument("index set: negative log power");
    std::sort(gens.begin(), gens.end(), [](const IndexPair& a, const IndexPair& b) {
        return a.gamma != b.gamma ? a.gamma < b.gamma : a.p > b.p;
    });
    IndexSet s;
    for (const auto& g : gens) {
        bool covered = std::any_of(s.gens_.begin(), s.gens_.end(), [&](const IndexPair& k) {
            return is_nat(g.gamma - k.gamma) && g.p <= k.p;
        });
        if (!covered) s.gens_.push_back(g);
    }
    std::sort(s.gens_.begin(), s.gens_.end(), [](const IndexPair& a, const IndexPair& b) {
        return a.gamma != b.gamma ? a.gamma < b.gamma : a.p < b.p;
    });
    return s;
}

int IndexSet::max_log(const Rational& g) const {
    int best = -1;
    for (const auto& k : gens_)
        if (is_nat(g - k.gamma)) best = std::max(best, k.p);
    return best;
}

std::optional<Rational> IndexSet::leading() const {
    if (gens_.empty()) return std::nullopt;
    return gens_.front().gamma;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    auto g = a.generators();
    g.insert(g.end(), b.generators().begin(), b.generators().end());
    return IndexSet::from(std::move(g));
}

IndexSet extended_union(const IndexSet& a, const IndexSet& b) {
    // max log power is monotone along g + N0 and only changes at generator
    // exponents, so evaluating at those points describes the closure exactly
    std::vector<IndexPair> out;
    auto visit = [&](const Rational& g) {
        int pa = a.max_log(g), pb = b.max_log(g);
        int p = std::max(pa, pb);
        if (pa >= 0 && pb >= 0) p = std::max(p, pa + pb + 1);
        if (p >= 0) out.push_back({g, p});
    };
    for (const auto& k : a.generators()) visit(k.gamma);
    for (const auto& k : b.generators()) visit(k.gamma);
    return IndexSet::from(std::move(out));
}

IndexSet minkowski_sum(const IndexSet& a, const IndexSet& b) {
    std::vector<IndexPair> out;
    for (const auto& x : a.generators())
        for (const auto& y : b.generators()) out.push_back({x.gamma + y.gamma, x.p + y.p});
    return IndexSet::from(std::move(out));
}

IndexSet scale(const IndexSet& a, const Rational& alpha) {
    if (alpha <= 0) throw std::invalid_argument("index set: scale factor must be positive");
    std::vector<IndexPair> out;
    // alpha (g + N0) for alpha = p/q is covered by alpha (g + k) + N0, k < q
    for (const auto& x : a.generators())
        for (long long k = 0; k < alpha.denominator(); ++k) out.push_back({alpha * (x.gamma + Rational(k)), x.p});
    return IndexSet::from(std::move(out));
}

IndexSet shift(const IndexSet& a, const Rational& r) {
    std::vector<IndexPair> out;
    for (const auto& x : a.generators()) out.push_back({x.gamma + r, x.p});
    return IndexSet::from(std::move(out));
}

std::string to_string(const IndexSet& s) {
    if (s.is_infinite()) return "inf";
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < s.generators().size(); ++i) {
        if (i) os << ", ";
        os << '(' << to_string(s.generators()[i].gamma) << ',' << s.generators()[i].p << ')';
    }
    os << '}';
    return os.str();
}

const IndexSet& IndexFamily::at(const std::string& face) const {
    auto it = sets.find(face);
    if (it == sets.end()) throw std::invalid_argument("index family has no face '" + face + "'");
    return it->second;
}

void IndexFamily::validate() const {
    if (!space) throw std::invalid_argument("index family without a space");
    if (sets.size() != space->face_count())
        throw std::invalid_argument("index family over '" + space->name() + "' does not cover every face");
    for (const auto& f : space->faces())
        if (!sets.count(f.label))
            throw std::invalid_argument("index family over '" + space->name() + "' misses face '" + f.label + "'");
}

IndexFamily uniform_family(const SpacePtr& s, const IndexSet& e) {
    IndexFamily f{s, {}};
    for (const auto& face : s->faces()) f.sets[face.label] = e;
    return f;
}

IndexFamily pullback_family(const BMap& map, const IndexFamily& fam) {
    fam.validate();
    if (!fam.space->same_layout(*map.target()))
        throw std::invalid_argument("pullback: family lives on '" + fam.space->name() + "', map targets '" +
                                    map.target()->name() + "'");
    const auto& S = *map.source();
    const auto& T = *map.target();
    IndexFamily out{map.source(), {}};
    for (std::size_t j = 0; j < S.face_count(); ++j) {
        std::optional<IndexSet> acc;
        for (std::size_t i = 0; i < T.face_count(); ++i) {
            if (map.at(i, j) == 0) continue;
            IndexSet term = scale(fam.at(T.faces()[i].label), map.at(i, j));
            acc = acc ? minkowski_sum(*acc, term) : term;
        }
        out.sets[S.faces()[j].label] = acc ? *acc : IndexSet::smooth();
    }
    return out;
}

IndexFamily multiply_density(const IndexFamily& fam, const DensityWeight& w) {
    fam.validate();
    if (w.size() != fam.space->face_count()) throw std::invalid_argument("density weight has wrong length");
    IndexFamily out = fam;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const auto& label = fam.space->faces()[j].label;
        out.sets[label] = shift(fam.at(label), w[j]);
    }
    return out;
}

PushforwardResult pushforward_family(const BMap& map, const IndexFamily& fam, const DensityWeight& density) {
    IndexFamily u = multiply_density(fam, density);
    if (!u.space->same_layout(*map.source()))
        throw std::invalid_argument("pushforward: family lives on '" + fam.space->name() + "', map starts at '" +
                                    map.source()->name() + "'");
    const auto& S = *map.source();
    const auto& T = *map.target();
    PushforwardResult r{IndexFamily{map.target(), {}}, true, "", std::nullopt};
    for (std::size_t j = 0; j < S.face_count() && r.integrable; ++j) {
        bool interior = true;
        for (std::size_t i = 0; i < T.face_count(); ++i)
            if (map.at(i, j) != 0) interior = false;
        if (!interior) continue;
        for (const auto& g : u.at(S.faces()[j].label).generators()) {
            if (g.gamma <= 0) {
                r.integrable = false;
                r.failing_face = S.faces()[j].label;
                r.failing_generator = g;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < T.face_count(); ++i) {
        std::optional<IndexSet> acc;
        for (std::size_t j = 0; j < S.face_count(); ++j) {
            if (map.at(i, j) == 0) continue;
            IndexSet term = scale(u.at(S.faces()[j].label), Rational(1) / map.at(i, j));
            acc = acc ? extended_union(*acc, term) : term;
        }
        r.family.sets[T.faces()[i].label] = acc ? *acc : IndexSet::smooth();
    }
    return r;
}

std::string to_string(const KernelOrder& k) {
    return "H^{" + to_string(k.a) + "," + (k.ell ? to_string(*k.ell) : std::string("inf")) + "} (m=" +
           std::to_string(k.m) + ")";
}

IndexFamily kernel_family(const KernelOrder& k, const SpacePtr& space) {
    IndexFamily f = uniform_family(space, IndexSet::infinite());
    auto put = [&](const char* face, const Rational& g) {
        if (!space->find_face(face))
            throw std::invalid_argument("kernel order needs face '" + std::string(face) + "' on '" + space->name() + "'");
        f.sets[face] = IndexSet::from({{g, 0}});
    };
    if (space->find_face("fd")) {
        put("fd", k.a - 3);
        if (k.ell) put("td", *k.ell - k.m);
    } else {
        put("11sc", k.a - 3);
    }
    return f;
}

CompositionLedger composition_ledger(const KernelOrder& A, const KernelOrder& B) {
    if (B.ell) throw std::invalid_argument("composition ledger: B must vanish to infinite order at td");
    if (A.m != B.m) throw std::invalid_argument("composition ledger: dimension mismatch");
    const Catalog& c = catalog();
    const SpacePtr& dbl = c.space("M2phi_R");
    const SpacePtr& tri = c.space("HM3phi");

    IndexFamily a = pullback_family(c.map("Pi_L"), kernel_family(A, dbl));
    IndexFamily b = pullback_family(c.map("Pi_R"), kernel_family(B, dbl));
    IndexFamily prod{tri, {}};
    for (const auto& f : tri->faces()) prod.sets[f.label] = minkowski_sum(a.at(f.label), b.at(f.label));

    CompositionLedger L;
    auto lead = [](const IndexFamily& fam, const std::string& face) {
        auto g = fam.at(face).leading();
        if (!g) throw std::logic_error("composition ledger: face '" + face + "' unexpectedly of infinite order");
        return *g;
    };
    L.steps.push_back({"product of lifted kernels", tri->name(), "O", lead(prod, "O")});

    // dvol(p'') dt'' against b-densities: t' t'' (x x' x'')^{-1}
    const BMap& btr = c.map("beta_Tr");
    DensityWeight nu3 = lift_monomial(
        btr, monomial_from(*btr.target(), {{"t'", 1}, {"t''", 1}, {"x", -1}, {"x'", -1}, {"x''", -1}}));
    IndexFamily weighted = multiply_density(prod, nu3);
    L.steps.push_back({"after density lift", tri->name(), "O", lead(weighted, "O")});

    PushforwardResult pushed = pushforward_family(c.map("Pi_C"), weighted, DensityWeight(tri->face_count(), 0));
    if (!pushed.integrable)
        throw std::logic_error("composition ledger: not integrable at face '" + pushed.failing_face + "'");
    L.steps.push_back({"pushforward along Pi_C", dbl->name(), "11sc", lead(pushed.family, "11sc")});

    // the target b-density against dvol dt: t (x x')^{-1}, on the product double space
    const BMap& bp = c.map("beta_phi_Rprod");
    Monomial nu2 = lift_monomial(bp, monomial_from(*bp.target(), {{"t", 1}, {"x", -1}, {"x'", -1}}));
    Rational nu2_fd = nu2[bp.source()->face_index("11sc")];
    L.steps.push_back({"divide by lifted nu2", dbl->name(), "11sc", lead(pushed.family, "11sc") - nu2_fd});

    for (const auto& f : dbl->faces())
        if (f.label != "11sc" && !pushed.family.at(f.label).is_infinite())
            throw std::logic_error("composition ledger: face '" + f.label + "' is not of infinite order");
    L.result = KernelOrder{L.steps.back().exponent + 3, std::nullopt, A.m};
    L.note = "A with finite ell at td reduces to this case by splitting off an infinite-order remainder";
    return L;
}

}  // namespace phicalc
