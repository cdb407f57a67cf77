#include "phicalc/catalog.hpp"

namespace phicalc {

namespace {

Variable bvar(const std::string& n, const std::string& face) {
    return Variable{n, VariableKind::spatial, 1, true, face};
}
Variable tvar(const std::string& n, int w, const std::string& face) {
    return Variable{n, VariableKind::temporal, w, true, face};
}
Variable ivar(const std::string& n) { return Variable{n, VariableKind::spatial, 1, false, ""}; }

BlowupCenter center(std::string id, std::vector<std::string> van,
                    std::vector<std::pair<std::string, std::string>> ids, std::string label) {
    return BlowupCenter{std::move(id), std::move(van), std::move(ids), std::move(label), false};
}

using Terms = std::vector<std::map<std::string, Rational>>;
Terms one(const std::string& v) { return {{{v, Rational(1)}}}; }

void put(Catalog& c, const std::string& name, BMap m) {
    c.maps.erase(name);
    c.maps.emplace(name, std::move(m));
}

}  // namespace

const SpacePtr& Catalog::space(const std::string& name) const {
    auto it = spaces.find(name);
    if (it == spaces.end()) throw GeometryError("catalog has no space '" + name + "'");
    return it->second;
}

const BMap& Catalog::map(const std::string& name) const {
    auto it = maps.find(name);
    if (it == maps.end()) throw GeometryError("catalog has no map '" + name + "'");
    return it->second;
}

Catalog build_catalog() {
    Catalog c;

    std::vector<Variable> dbl = {bvar("x", "rf"), bvar("x'", "lf"), ivar("y"), ivar("y'"), ivar("z"), ivar("z'")};
    auto ff = center("ff", {"x", "x'"}, {}, "ff");
    auto fd = center("fd", {"x", "x'"}, {{"y", "y'"}}, "fd");

    auto [m2b, beta_b] = run_program("M2b", dbl, {ff});
    c.spaces["M2b"] = m2b;
    put(c, "beta_b", beta_b);
    c.programs["M2b"] = {ff};

    auto [m2phi, step_fd] = extend_program(m2b, {fd}, "M2phi");
    c.spaces["M2phi"] = m2phi;
    put(c, "beta_phi_b", step_fd);
    put(c, "beta_phi", compose_bmaps(beta_b, step_fd));
    c.programs["M2phi"] = {ff, fd};

    auto heat_vars = dbl;
    heat_vars.insert(heat_vars.begin() + 2, tvar("tau", 1, "tf"));
    auto [m2t, beta_m2t] = run_program("M2phi_t", heat_vars, {ff, fd});
    c.spaces["M2phi_t"] = m2t;
    put(c, "beta_phi_t", beta_m2t);
    c.programs["M2phi_t"] = {ff, fd};

    auto td = center("td", {"tau"}, {{"x", "x'"}, {"y", "y'"}, {"z", "z'"}}, "td");
    auto [hm, step_td] = extend_program(m2t, {td}, "HMphi");
    c.spaces["HMphi"] = hm;
    put(c, "beta_heat_td", step_td);
    put(c, "beta_heat", compose_bmaps(beta_m2t, step_td));
    c.programs["HMphi"] = {ff, fd, td};

    // double spaces with t = tau^2 as generator; face names follow the triple-space convention
    std::vector<Variable> dblR = {bvar("x", "10"), bvar("x'", "01"), tvar("t", 2, "tau"),
                                  ivar("y"), ivar("y'"), ivar("z"), ivar("z'")};
    auto c11 = center("F11", {"t", "x", "x'"}, {}, "11");
    auto c11sc = center("F11sc", {"t", "x", "x'"}, {{"y", "y'"}}, "11sc");
    auto [m2r, beta_r] = run_program("M2phi_R", dblR, {c11, c11sc});
    c.spaces["M2phi_R"] = m2r;
    put(c, "beta_phi_R", beta_r);
    c.programs["M2phi_R"] = {c11, c11sc};

    auto p11 = center("F11", {"x", "x'"}, {}, "11");
    auto p11sc = center("F11sc", {"x", "x'"}, {{"y", "y'"}}, "11sc");
    auto [m2p, beta_p] = run_program("M2phi_Rprod", dblR, {p11, p11sc});
    c.spaces["M2phi_Rprod"] = m2p;
    put(c, "beta_phi_Rprod", beta_p);
    c.programs["M2phi_Rprod"] = {p11, p11sc};

    std::vector<Variable> tri = {bvar("x", "100"), bvar("x'", "010"), bvar("x''", "001"),
                                 tvar("t'", 2, "tau1"), tvar("t''", 2, "tau2"),
                                 ivar("y"), ivar("y'"), ivar("y''"), ivar("z"), ivar("z'"), ivar("z''")};
    auto F = center("F", {"t'", "t''", "x", "x'", "x''"}, {}, "111");
    auto FO = center("F_O", {"t'", "t''"}, {}, "tauO");
    auto FC = center("F_C", {"t'", "t''", "x", "x''"}, {}, "101");
    auto FL = center("F_L", {"t''", "x'", "x''"}, {}, "011");
    auto FR = center("F_R", {"t'", "x", "x'"}, {}, "110");
    auto O = center("O", {"t'", "t''", "x", "x'", "x''"}, {{"y", "y''"}, {"y'", "y''"}}, "O");
    auto FCsc = center("F_C_Sc", {"t'", "t''", "x", "x''"}, {{"y", "y''"}}, "101sc");
    auto FLsc = center("F_L_Sc", {"t''", "x'", "x''"}, {{"y'", "y''"}}, "011sc");
    auto FRsc = center("F_R_Sc", {"t'", "x", "x'"}, {{"y", "y'"}}, "110sc");

    auto [m3b, beta1] = run_program("M3b", tri, {F});
    c.spaces["M3b"] = m3b;
    put(c, "beta_1", beta1);
    c.programs["M3b"] = {F};

    for (const auto& [a, b] : std::vector<std::pair<BlowupCenter, BlowupCenter>>{{FC, FL}, {FC, FR}, {FL, FR}})
        if (!separated_after(*m3b, F, a, b))
            throw GeometryError("catalog: centers " + a.id + " and " + b.id + " are not separated by F");

    auto [m3bt, beta2] = extend_program(m3b, {FO, FC, FL, FR}, "M3bt");
    c.spaces["M3bt"] = m3bt;
    put(c, "beta_2", beta2);
    c.programs["M3bt"] = {F, FO, FC, FL, FR};

    auto [hm3, beta3] = extend_program(m3bt, {O, FCsc, FLsc, FRsc}, "HM3phi");
    c.spaces["HM3phi"] = hm3;
    put(c, "beta_3", beta3);
    c.programs["HM3phi"] = {F, FO, FC, FL, FR, O, FCsc, FLsc, FRsc};
    BMap beta_tr = compose_bmaps(compose_bmaps(beta1, beta2), beta3);
    put(c, "beta_Tr", BMap("beta_Tr", beta_tr.source(), beta_tr.target(), beta_tr.matrix()));

    BaseProjection piC, piL, piR;
    piC.pullback = {{"x", one("x")}, {"x'", one("x''")}, {"t", {{{"t'", 1}}, {{"t''", 1}}}}};
    piC.rename = {{"x", "x"}, {"x''", "x'"}, {"y", "y"}, {"y''", "y'"}, {"z", "z"}, {"z''", "z'"}};
    piL.pullback = {{"x", one("x")}, {"x'", one("x'")}, {"t", one("t'")}};
    piL.rename = {{"x", "x"}, {"x'", "x'"}, {"y", "y"}, {"y'", "y'"}, {"z", "z"}, {"z'", "z'"}};
    piR.pullback = {{"x", one("x'")}, {"x'", one("x''")}, {"t", one("t''")}};
    piR.rename = {{"x'", "x"}, {"x''", "x'"}, {"y'", "y"}, {"y''", "y'"}, {"z'", "z"}, {"z''", "z'"}};
    c.projections = {{"pi_C", piC}, {"pi_L", piL}, {"pi_R", piR}};

    const BMap& btr = c.maps.at("beta_Tr");
    for (const auto& [n, pi] : c.projections) {
        std::string name = "Pi_" + n.substr(3);
        BMap P = solve_projection_lift(name, btr, beta_r, pi);
        P.b_submersion_declared = true;
        put(c, name, P);
    }
    return c;
}

const Catalog& catalog() {
    static const Catalog c = build_catalog();
    return c;
}

}  // namespace phicalc
