#pragma once

#include "phicalc/corner.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phicalc {

struct IndexPair {
    Rational gamma;
    int p = 0;
    bool operator==(const IndexPair&) const = default;
};

// Index set given by generators; the set itself is the closure
// {(g + n, q) : (g,p) generator, n in N0, q <= p}. No generators = infinite order.
class IndexSet {
public:
    IndexSet() = default;
    static IndexSet infinite() { return {}; }
    static IndexSet smooth() { return from({{Rational(0), 0}}); }
    static IndexSet from(std::vector<IndexPair> gens);

    const std::vector<IndexPair>& generators() const { return gens_; }
    bool is_infinite() const { return gens_.empty(); }
    int max_log(const Rational& g) const;  // -1 when (g, 0) is not in the set
    bool contains(const Rational& g, int p) const { return p >= 0 && max_log(g) >= p; }
    std::optional<Rational> leading() const;
    bool operator==(const IndexSet& o) const { return gens_ == o.gens_; }

private:
    std::vector<IndexPair> gens_;  // minimal, sorted
};

IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet extended_union(const IndexSet& a, const IndexSet& b);
IndexSet minkowski_sum(const IndexSet& a, const IndexSet& b);
IndexSet scale(const IndexSet& a, const Rational& alpha);  // alpha > 0
IndexSet shift(const IndexSet& a, const Rational& r);
std::string to_string(const IndexSet& s);

struct IndexFamily {
    SpacePtr space;
    std::map<std::string, IndexSet> sets;

    const IndexSet& at(const std::string& face) const;
    void validate() const;  // keys exactly the faces
};

IndexFamily uniform_family(const SpacePtr& s, const IndexSet& e);

// density weight: exponents of defining functions relative to a b-density
using DensityWeight = Monomial;

IndexFamily pullback_family(const BMap& map, const IndexFamily& fam);
IndexFamily multiply_density(const IndexFamily& fam, const DensityWeight& w);

struct PushforwardResult {
    IndexFamily family;
    bool integrable = true;
    std::string failing_face;
    std::optional<IndexPair> failing_generator;
};

PushforwardResult pushforward_family(const BMap& map, const IndexFamily& fam, const DensityWeight& density);

// Heat-calculus order: fd -> a - 3, td -> ell - m, all other faces infinite.
struct KernelOrder {
    Rational a;
    std::optional<Rational> ell;  // nullopt = infinite order at td
    int m = 1;
    bool operator==(const KernelOrder&) const = default;
};

std::string to_string(const KernelOrder& k);
// family on HMphi (fd/td) or on the time-blown double space (11sc carries fd)
IndexFamily kernel_family(const KernelOrder& k, const SpacePtr& space);

struct LedgerStep {
    std::string what;
    std::string space;
    std::string face;
    Rational exponent;
};

struct CompositionLedger {
    std::vector<LedgerStep> steps;
    KernelOrder result;
    std::string note;
};

CompositionLedger composition_ledger(const KernelOrder& A, const KernelOrder& B);

}  // namespace phicalc
