#pragma once

#include "phicalc/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phicalc {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class VariableKind { spatial, temporal };

struct Variable {
    std::string name;
    VariableKind kind = VariableKind::spatial;
    int weight = 1;
    // boundary generators produce a face {v=0}; interior ones (y, z) only appear in identifications
    bool boundary = true;
    std::string face;  // label of {v=0}, defaults to name
};

struct BlowupCenter {
    std::string id;
    std::vector<std::string> vanishing;  // variable names or prior face labels
    std::vector<std::pair<std::string, std::string>> identifications;
    std::string label;  // label of the new face
    bool requires_face = false;
};

// Relations defining a (closed) locus: vanishing boundary variables plus
// equalities between variables. Stored closed: `ids` holds every implied pair.
struct Locus {
    std::set<std::string> vanishing;
    std::set<std::pair<std::string, std::string>> ids;  // ordered pairs (a<b)

    // true when every relation of *this holds on `other`, i.e. other ⊆ {this}
    bool implied_by(const Locus& other) const;
    bool operator==(const Locus&) const = default;
};

Locus close_locus(const std::set<std::string>& vanishing,
                  const std::vector<std::pair<std::string, std::string>>& ids);

struct BoundaryFace {
    std::string label;
    std::string origin;  // generator name or center id
    int weight = 1;
    Locus condition;
};

class CornerSpace {
public:
    CornerSpace(std::string name, std::vector<Variable> variables);

    const std::string& name() const { return name_; }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<BoundaryFace>& faces() const { return faces_; }
    const std::vector<BlowupCenter>& program() const { return program_; }

    std::size_t face_count() const { return faces_.size(); }
    std::optional<std::size_t> find_face(const std::string& label) const;
    std::size_t face_index(const std::string& label) const;  // throws
    const Variable* find_variable(const std::string& name) const;
    std::vector<const Variable*> boundary_generators() const;

    // closure of a center's relations, validated against this space
    Locus center_locus(const BlowupCenter& c) const;

    // faces H with cond(H) implied by the locus, keeping only maximal ones
    std::vector<std::size_t> maximal_containing_faces(const Locus& l) const;

    bool same_layout(const CornerSpace& o) const;

private:
    friend struct SpaceBuilder;
    std::string name_;
    std::vector<Variable> variables_;
    std::vector<BoundaryFace> faces_;
    std::vector<BlowupCenter> program_;
};

using SpacePtr = std::shared_ptr<const CornerSpace>;

// Exponent matrix alpha(target face i, source face j): pullback of the i-th
// target defining function is prod_j rho_j^alpha(i,j) times a smooth factor.
class BMap {
public:
    BMap(std::string name, SpacePtr source, SpacePtr target,
         std::vector<std::vector<Rational>> alpha);

    const std::string& name() const { return name_; }
    const SpacePtr& source() const { return source_; }
    const SpacePtr& target() const { return target_; }
    const Rational& at(std::size_t i, std::size_t j) const { return alpha_[i][j]; }
    const std::vector<std::vector<Rational>>& matrix() const { return alpha_; }

    std::vector<bool> smooth_positive;  // per target face
    bool b_submersion_declared = false;

private:
    std::string name_;
    SpacePtr source_, target_;
    std::vector<std::vector<Rational>> alpha_;
};

using Monomial = std::vector<Rational>;  // exponents indexed by face

std::pair<SpacePtr, BMap> blow_up(const SpacePtr& space, const BlowupCenter& c);
BMap identity_bmap(const SpacePtr& space);
BMap compose_bmaps(const BMap& outer, const BMap& inner);

// the unblown space generated by the same variables
SpacePtr base_space(const CornerSpace& space);
// blowdown to the base using the closure rule directly (no composition)
BMap direct_blowdown(const SpacePtr& space);
// blow up `centers` in order starting from `start`; the returned map goes to `start`
std::pair<SpacePtr, BMap> extend_program(const SpacePtr& start, const std::vector<BlowupCenter>& centers,
                                         const std::string& name);
// same, starting from the unblown space of `vars`
std::pair<SpacePtr, BMap> run_program(const std::string& name, std::vector<Variable> vars,
                                      const std::vector<BlowupCenter>& program);

Monomial lift_monomial(const BMap& map, const Monomial& m);
Monomial monomial_from(const CornerSpace& s, const std::map<std::string, Rational>& named);
std::string format_monomial(const CornerSpace& s, const Monomial& m, const std::string& prefix = "rho_");

enum class FibrationVerdict { b_map, b_submersion_assumed, b_fibration };

struct FibrationCertificate {
    FibrationVerdict verdict = FibrationVerdict::b_map;
    bool nonnegative = true;
    bool column_condition = true;
    // source face -> target faces with nonzero exponent (only failing columns)
    std::vector<std::pair<std::string, std::vector<std::string>>> witnesses;
};

FibrationCertificate certify_b_fibration(const BMap& map);
std::string to_string(FibrationVerdict v);

// Data for the base square pi o beta_src = beta_tgt o Pi.
struct BaseProjection {
    // target base variable -> sum of source monomials (a sum lifts to the min)
    std::map<std::string, std::vector<std::map<std::string, Rational>>> pullback;
    // source variable -> target variable, used to transport identifications
    std::map<std::string, std::string> rename;
};

BMap solve_projection_lift(const std::string& name, const BMap& source_blowdown,
                           const BMap& target_blowdown, const BaseProjection& pi);

// lift of a sum of base monomials: componentwise min of the lifts
Monomial lift_posynomial(const BMap& map, const std::vector<std::map<std::string, Rational>>& terms);

// after blowing up `parent`, centers a and b are separated
bool separated_after(const CornerSpace& s, const BlowupCenter& parent,
                     const BlowupCenter& a, const BlowupCenter& b);

}  // namespace phicalc
