// phicalc command line: exit 0 pass, 1 check failure, 2 usage or schema error
#include "phicalc/asymptotics.hpp"
#include "phicalc/catalog.hpp"
#include "phicalc/reports.hpp"
#include "phicalc/volterra.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace phicalc;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::map<std::string, Rational> parse_named(const std::string& spec) {
    // "x=1,x'=-1/2"
    std::map<std::string, Rational> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("expected name=value in '" + item + "'");
        out[item.substr(0, eq)] = parse_rational(item.substr(eq + 1));
    }
    return out;
}

std::optional<Rational> parse_ell(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::nullopt;
    return parse_rational(s);
}

SpacePtr load_space(const std::string& name, const std::string& program) {
    if (!program.empty()) {
        ProgramSpec p = parse_program(read_json_file(program), program);
        return run_program(p.name, p.variables, p.program).first;
    }
    return catalog().space(name);
}

KernelEvaluator pick_kernel(const std::string& k, const ModelGeometry& g) {
    if (k == "exact") {
        if (g.f != 0) throw UsageError("the exact kernel needs f = 0");
        return exact_scattering_heat(g.m());
    }
    if (k == "nfd") return nfd_evaluator(g);
    if (k == "ntd") return ntd_evaluator(g);
    if (k == "H0") return initial_parametrix(g);
    if (k == "td-branch") return td_branch_parametrix(g);
    throw UsageError("unknown kernel '" + k + "' (exact|nfd|ntd|H0|td-branch)");
}

ModelGeometry load_geometry(const std::string& path, int m_fallback) {
    if (!path.empty()) return parse_geometry(read_json_file(path), path);
    return ModelGeometry{m_fallback - 1, 0, {}};
}

std::vector<std::vector<double>> read_csv_numbers(const std::string& path, std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (header.empty()) {
            header = cells;
            continue;
        }
        if (cells.size() != header.size())
            throw SchemaError(path + ":" + std::to_string(n) + ": expected " + std::to_string(header.size()) +
                              " columns");
        std::vector<double> r;
        for (const auto& x : cells) {
            try {
                r.push_back(std::stod(x));
            } catch (const std::exception&) {
                throw SchemaError(path + ":" + std::to_string(n) + ": '" + x + "' is not a number");
            }
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phicalc: corner geometry, index sets and heat kernels of the scattering model"};
    app.require_subcommand(1);
    int status = 0;

    // spaces ---------------------------------------------------------
    auto* spaces = app.add_subcommand("spaces", "build, lift through and certify b-maps")->require_subcommand(1);
    std::string sp_name = "HM3phi", sp_program, sp_svg;
    auto* build = spaces->add_subcommand("build", "list the faces of a catalog space or a program");
    build->add_option("--name", sp_name, "catalog space");
    build->add_option("--program", sp_program, "program JSON file");
    build->add_option("--svg", sp_svg, "write the face lattice here");
    build->callback([&] {
        SpacePtr s = load_space(sp_name, sp_program);
        json faces = json::array();
        for (const auto& f : s->faces())
            faces.push_back({{"label", f.label}, {"origin", f.origin}, {"weight", f.weight}});
        std::cout << json{{"space", s->name()}, {"faces", faces}}.dump(2) << "\n";
        if (!sp_svg.empty()) write_text_file(sp_svg, emit_face_lattice(*s));
    });

    std::string map_name, monomial;
    auto* lift = spaces->add_subcommand("lift", "lift a monomial of the target along a catalog map");
    lift->add_option("--map", map_name, "catalog map")->required();
    lift->add_option("--monomial", monomial, "e.g. \"t'=1,x=-1\" (generators or face labels)")->required();
    lift->callback([&] {
        const BMap& m = catalog().map(map_name);
        Monomial got = lift_monomial(m, monomial_from(*m.target(), parse_named(monomial)));
        std::cout << format_monomial(*m.source(), got) << "\n";
    });

    auto* certify = spaces->add_subcommand("certify", "b-fibration certificate of a catalog map");
    certify->add_option("--map", map_name, "catalog map")->required();
    certify->callback([&] {
        auto c = certify_b_fibration(catalog().map(map_name));
        std::cout << map_name << ": " << to_string(c.verdict) << "\n";
        for (const auto& [src, tgts] : c.witnesses) {
            std::cout << "  column " << src << " hits";
            for (const auto& t : tgts) std::cout << " " << t;
            std::cout << "\n";
        }
        if (c.verdict != FibrationVerdict::b_fibration) status = 1;
    });

    // index ----------------------------------------------------------
    auto* index = app.add_subcommand("index", "index families along b-maps")->require_subcommand(1);
    std::string fam_path, density;
    auto* push = index->add_subcommand("push", "pushforward of an index family");
    push->add_option("--map", map_name)->required();
    push->add_option("--family", fam_path, "index family JSON")->required();
    push->add_option("--density", density, "extra density exponents, face=value list");
    push->callback([&] {
        const BMap& m = catalog().map(map_name);
        IndexFamily f = parse_index_family(read_json_file(fam_path), fam_path);
        DensityWeight w(m.source()->face_count(), Rational(0));
        if (!density.empty()) w = monomial_from(*m.source(), parse_named(density));
        auto r = pushforward_family(m, f, w);
        if (!r.integrable) {
            std::cerr << "not integrable at face " << r.failing_face << "\n";
            status = 1;
            return;
        }
        std::cout << index_family_json(r.family).dump(2) << "\n";
    });
    auto* pull = index->add_subcommand("pull", "pullback of an index family");
    pull->add_option("--map", map_name)->required();
    pull->add_option("--family", fam_path, "index family JSON")->required();
    pull->callback([&] {
        IndexFamily f = parse_index_family(read_json_file(fam_path), fam_path);
        std::cout << index_family_json(pullback_family(catalog().map(map_name), f)).dump(2) << "\n";
    });
    std::string a_s = "3", ea_s = "0", b_s = "4", eb_s = "inf";
    int dim = 1;
    auto* comp = index->add_subcommand("compose", "composition ledger of two heat-calculus orders");
    comp->add_option("--a", a_s);
    comp->add_option("--ell-a", ea_s);
    comp->add_option("--b", b_s);
    comp->add_option("--ell-b", eb_s);
    comp->add_option("--m", dim);
    comp->callback([&] {
        KernelOrder A{parse_rational(a_s), parse_ell(ea_s), dim}, B{parse_rational(b_s), parse_ell(eb_s), dim};
        CompositionLedger L;
        try {
            L = composition_ledger(A, B);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        for (const auto& s : L.steps)
            std::cout << s.what << " [" << s.space << ", " << s.face << "]: " << to_string(s.exponent) << "\n";
        std::cout << "result " << to_string(L.result) << "\n";
    });

    // kernel ---------------------------------------------------------
    auto* kernel = app.add_subcommand("kernel", "heat kernels")->require_subcommand(1);
    std::string kname = "exact", geo_path, grid_path, chart = "fd";
    auto* keval = kernel->add_subcommand("eval", "evaluate a kernel on a CSV grid");
    keval->add_option("--kernel", kname, "exact|nfd|ntd|H0|td-branch");
    keval->add_option("--geo", geo_path, "geometry JSON (default b = m-1, f = 0)");
    keval->add_option("--m", dim, "dimension when no geometry is given");
    keval->add_option("--chart", chart, "standard|ff|fd|td");
    keval->add_option("--grid", grid_path, "CSV: tau,xp,a,u*,yp*,z*,zp*")->required();
    keval->callback([&] {
        ModelGeometry g = load_geometry(geo_path, dim);
        KernelEvaluator K = pick_kernel(kname, g);
        Chart c = parse_chart(chart);
        std::vector<std::string> header;
        auto rows = read_csv_numbers(grid_path, header);
        std::size_t want = 3 + 2 * g.b + 2 * g.f;
        if (header.size() != want)
            throw SchemaError(grid_path + ": expected " + std::to_string(want) + " columns for b=" +
                              std::to_string(g.b) + ", f=" + std::to_string(g.f));
        for (std::size_t i = 0; i < header.size(); ++i) std::cout << header[i] << ",";
        std::cout << "value\n";
        std::cout.precision(15);
        for (const auto& r : rows) {
            HeatEvalPoint p;
            p.chart = c;
            p.tau = r[0];
            p.xp = r[1];
            p.a = r[2];
            std::size_t k = 3;
            p.u.assign(r.begin() + k, r.begin() + k + g.b);
            k += g.b;
            p.yp.assign(r.begin() + k, r.begin() + k + g.b);
            k += g.b;
            p.z.assign(r.begin() + k, r.begin() + k + g.f);
            k += g.f;
            p.zp.assign(r.begin() + k, r.begin() + k + g.f);
            for (double v : r) std::cout << v << ",";
            std::cout << K(p) << "\n";
        }
    });

    // asymptotics ----------------------------------------------------
    auto* asym = app.add_subcommand("asymptotics", "boundary orders")->require_subcommand(1);
    std::string face = "td";
    int n_max = 8;
    auto* fit = asym->add_subcommand("fit", "fitted order at a face of the heat space");
    fit->add_option("--kernel", kname);
    fit->add_option("--geo", geo_path);
    fit->add_option("--m", dim);
    fit->add_option("--face", face, "td|fd|ff|tf|lf|rf");
    fit->add_option("--n-max", n_max, "infinite-order check depth");
    fit->callback([&] {
        ModelGeometry g = load_geometry(geo_path, dim);
        KernelEvaluator K = pick_kernel(kname, g);
        ApproachPath path;
        try {
            path = standard_path(face, g);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        OrderFit f = fit_face_order(K, path);
        auto io = check_infinite_order(K, path, n_max);
        json out = {{"kernel", K.name},         {"face", face},        {"slope", f.slope},
                    {"rms", f.residual},        {"drift", f.drift},    {"curvature", f.curvature},
                    {"verdict", f.verdict},     {"sigmas", f.sigmas},  {"values", f.values},
                    {"infinite_order", io.pass}, {"failing_n", io.failing_n}};
        std::cout << out.dump(2) << "\n";
    });

    // volterra -------------------------------------------------------
    auto* vol = app.add_subcommand("volterra", "Volterra iterates and Neumann series")->require_subcommand(1);
    int terms = 4;
    std::string samples_path;
    auto* vrun = vol->add_subcommand("run", "factorial table and Neumann errors on the m = 1 model");
    vrun->add_option("--geo", geo_path, "geometry JSON (must be m = 1)");
    vrun->add_option("--terms", terms, "L, at most 4");
    vrun->add_option("--samples", samples_path, "CSV t,p,pp (default: ten points at t = 1/2)");
    vrun->callback([&] {
        if (!geo_path.empty()) {
            ModelGeometry g = parse_geometry(read_json_file(geo_path), geo_path);
            if (g.m() != 1) throw UsageError("the Volterra desk model is one dimensional (b = f = 0)");
        }
        if (terms < 1 || terms > 4) throw UsageError("--terms must be in [1, 4]");
        DeskModel m;
        QuadratureSpec qf;
        qf.grid = uniform_grid(10, 0.05);
        auto rep = factorial_bound_check(desk_error(m), terms + 1, {1, 3, 5}, qf);
        std::cout << "ell,sup,fitted_c,ratio\n";
        for (const auto& r : rep.rows) std::cout << r.ell << "," << r.sup << "," << r.fitted_c << "," << r.ratio << "\n";
        if (!rep.ratios_decreasing) status = 1;

        std::vector<SamplePoint> S = default_neumann_samples();
        if (!samples_path.empty()) {
            std::vector<std::string> header;
            S.clear();
            for (const auto& r : read_csv_numbers(samples_path, header)) {
                if (r.size() != 3) throw SchemaError(samples_path + ": expected t,p,pp");
                if (!(r[0] > 0 && r[0] <= 1) || !(r[1] > 0) || !(r[2] > 0))
                    throw SchemaError(samples_path + ": need 0 < t <= 1 and p, p' > 0");
                S.push_back({r[0], r[1], r[2]});
            }
        }
        QuadratureSpec qn = neumann_quadrature();
        for (const auto& s : S) qn.T = std::max(qn.T, s.t);
        auto res = neumann_sum(desk_parametrix(m), desk_error(m), terms, S, qn);
        std::cout << "\nt,p,pp,L,partial,exact,rel_error\n";
        std::cout.precision(12);
        for (std::size_t i = 0; i < S.size(); ++i) {
            double ex = exact_scattering_heat(1, S[i].t, 1 / S[i].p, {}, 1 / S[i].pp, {});
            for (int L = 0; L <= terms; ++L)
                std::cout << S[i].t << "," << S[i].p << "," << S[i].pp << "," << L << "," << res.partial[L][i] << ","
                          << ex << "," << std::abs(res.partial[L][i] - ex) / ex << "\n";
        }
    });

    // report ---------------------------------------------------------
    auto* report = app.add_subcommand("report", "scenario runs")->require_subcommand(1);
    std::string scen_path, out_dir;
    auto* all = report->add_subcommand("all", "run every suite of a scenario and write the bundle");
    all->add_option("--scenario", scen_path, "scenario JSON")->required();
    all->add_option("--out", out_dir, "override output_dir");
    all->callback([&] {
        Scenario s = load_scenario(scen_path);
        if (!out_dir.empty()) s.output_dir = out_dir;
        ScenarioOutcome o = run_scenario(s);
        for (const auto& r : o.suites) std::cout << (r.pass() ? "PASS " : "FAIL ") << r.id << "\n";
        for (const auto& f : o.failures) std::cout << "  " << f << "\n";
        status = o.exit_code;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 2;
    } catch (const VolterraError& e) {
        std::cerr << "volterra: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return status;
}
