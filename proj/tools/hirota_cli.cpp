#include <cstdio>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "hirota/corpus.hpp"
#include "hirota/geometry.hpp"
#include "hirota/mongeampere.hpp"
#include "hirota/reductions.hpp"
#include "hirota/report.hpp"

using namespace hirota;

namespace {

const std::vector<std::string> kVars5 = {"a", "b", "c", "p", "q"};
const std::vector<std::string> kVars6 = {"u11", "u12", "u13", "u22", "u23", "u33"};

struct GlobalOpts {
    std::uint64_t seed = 1;
    double tol = 1e-7;
    bool json = false;
    int points = 5;
    int triples = 100;
    std::string corpus_file;  // empty = built-in
};

struct EquationOpts {
    std::string corpus_name;
    std::string expr_text;
    bool implicit = false;
    std::vector<double> base;    // 6 numbers for implicit --expr
    std::vector<double> box_lo;  // 5 numbers for evolutionary --expr
    std::vector<double> box_hi;
};

void add_equation_opts(CLI::App* cmd, EquationOpts& eq) {
    auto* c = cmd->add_option("--corpus", eq.corpus_name, "named corpus entry");
    auto* e = cmd->add_option("--expr", eq.expr_text,
                              "expression: density f(a,b,c,p,q), or F(u11..u33) with --implicit");
    cmd->add_flag("--implicit", eq.implicit, "treat --expr as an implicit 6-variable equation");
    cmd->add_option("--base", eq.base, "base point u11 u12 u13 u22 u23 u33 for --implicit")
        ->expected(6);
    cmd->add_option("--box-lo", eq.box_lo, "sampling box lower corner (a b c p q)")->expected(5);
    cmd->add_option("--box-hi", eq.box_hi, "sampling box upper corner (a b c p q)")->expected(5);
    c->excludes(e);
}

std::vector<CorpusEntry> load_entries(const GlobalOpts& g) {
    return g.corpus_file.empty() ? default_corpus() : load_corpus_file(g.corpus_file);
}

// Resolves --corpus/--expr flags to a corpus entry (synthesizing one for
// --expr); throws CLI::ValidationError on inconsistent flags.
CorpusEntry resolve_entry(const GlobalOpts& g, const EquationOpts& eq) {
    if (!eq.corpus_name.empty()) {
        for (auto& e : load_entries(g))
            if (e.name == eq.corpus_name) return e;
        throw CLI::ValidationError("--corpus", "no corpus entry named '" + eq.corpus_name + "'");
    }
    if (eq.expr_text.empty())
        throw CLI::ValidationError("--expr", "one of --corpus or --expr is required");
    CorpusEntry e;
    e.name = "(command line)";
    e.expr_text = eq.expr_text;
    e.evolutionary = !eq.implicit;
    if (eq.implicit) {
        if (eq.base.size() != 6)
            throw CLI::ValidationError("--base", "--implicit needs --base u11 ... u33");
        std::copy(eq.base.begin(), eq.base.end(), e.base.begin());
    } else {
        for (int i = 0; i < 5; ++i) {
            e.box.lo[static_cast<size_t>(i)] = eq.box_lo.size() == 5 ? eq.box_lo[static_cast<size_t>(i)] : -0.5;
            e.box.hi[static_cast<size_t>(i)] = eq.box_hi.size() == 5 ? eq.box_hi[static_cast<size_t>(i)] : 0.5;
        }
    }
    (void)entry_expr(e);  // surface parse errors as usage errors
    return e;
}

VerdictConfig make_config(const GlobalOpts& g) {
    VerdictConfig cfg;
    cfg.n_points = g.points;
    cfg.n_triples = g.triples;
    cfg.integrable_tol = g.tol;
    return cfg;
}

void emit(const GlobalOpts& g, const Json& j) { std::cout << render_report(j, g.json); }

std::array<double, 5> middle(const Box5& b) {
    std::array<double, 5> m;
    for (int i = 0; i < 5; ++i)
        m[static_cast<size_t>(i)] =
            0.5 * (b.lo[static_cast<size_t>(i)] + b.hi[static_cast<size_t>(i)]);
    return m;
}

int run_check(const GlobalOpts& g, const EquationOpts& eq) {
    CorpusEntry e = resolve_entry(g, eq);
    auto [src, box] = entry_jet_source(e);
    Verdict v = test_integrability(src, box, g.seed, make_config(g));
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "check";
    j["equation"] = e.name == "(command line)" ? e.expr_text : e.name;
    j["verdict"] = to_json(v);
    int rc = 0;
    if (e.expected_integrable >= 0) {
        Status want = e.expected_integrable ? Status::integrable : Status::not_integrable;
        j["expected"] = to_string(want);
        if (v.status != want) rc = 1;
    }
    if (v.status == Status::unsupported) rc = 3;
    emit(g, j);
    return rc;
}

int run_thirds(const GlobalOpts& g, const EquationOpts& eq, const std::vector<double>& at) {
    CorpusEntry e = resolve_entry(g, eq);
    auto [src, box] = entry_jet_source(e);
    std::array<double, 5> base = middle(box);
    if (at.size() == 5) std::copy(at.begin(), at.end(), base.begin());
    Snapshot s = Snapshot::from_jet(src(base));
    ThirdSolve ts = solve_thirds(s, g.triples, g.seed);
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "thirds";
    j["equation"] = e.name == "(command line)" ? e.expr_text : e.name;
    j["base"] = base;
    j["delta"] = delta(s);
    j["rank"] = ts.system_rank;
    j["lsq_residual"] = ts.lsq_residual;
    j["condition_estimate"] = ts.condition_estimate;
    j["thirds"] = ts.thirds;
    emit(g, j);
    return ts.system_rank == 35 ? 0 : 1;
}

int run_geometry(const GlobalOpts& g, const EquationOpts& eq) {
    CorpusEntry e = resolve_entry(g, eq);
    auto [src, box] = entry_jet_source(e);
    // geometry needs the density expression itself; reconstruct it for
    // implicit entries is out of scope, so sample bases and go through jets
    std::mt19937_64 rng(g.seed);
    std::vector<std::array<double, 5>> bases;
    for (int k = 0; k < g.points; ++k) {
        std::array<double, 5> b;
        for (int i = 0; i < 5; ++i) {
            std::uniform_real_distribution<double> d(box.lo[static_cast<size_t>(i)],
                                                     box.hi[static_cast<size_t>(i)]);
            b[static_cast<size_t>(i)] = d(rng);
        }
        bases.push_back(b);
    }
    if (!e.evolutionary)
        throw CLI::ValidationError("--corpus", "geometry needs an evolutionary equation");
    Expr f = entry_expr(e);
    GeometryReport rep = geometry_report(
        f, std::span<const std::array<double, 5>>(bases.data(), bases.size()), g.seed);
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "geometry";
    j["equation"] = e.name == "(command line)" ? e.expr_text : e.name;
    j["geometry"] = to_json(rep);
    emit(g, j);
    double worst = std::max({rep.max_det_identity_residual, rep.max_apolarity_residual,
                             rep.max_second_relation_residual, rep.max_tangent_vanishing_residual});
    return worst < 1e-6 ? 0 : 1;
}

int run_symmetries(const GlobalOpts& g, const EquationOpts& eq) {
    CorpusEntry e = resolve_entry(g, eq);
    SymmetryResult r = symmetry_dimension(entry_implicit(e), 80, g.seed, e.symmetry_box);
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "symmetries";
    j["equation"] = e.name == "(command line)" ? e.expr_text : e.name;
    j["symmetry"] = to_json(r);
    int rc = r.threshold_stable ? 0 : 1;
    if (e.expected_symmetry >= 0) {
        j["expected"] = e.expected_symmetry;
        if (r.dimension != e.expected_symmetry) rc = 1;
    }
    emit(g, j);
    return rc;
}

int run_orbit_rank(const GlobalOpts& g, const EquationOpts& eq, const std::vector<double>& at,
                   int expect) {
    CorpusEntry e = resolve_entry(g, eq);
    auto [src, box] = entry_jet_source(e);
    std::array<double, 5> base = middle(box);
    if (at.size() == 5) std::copy(at.begin(), at.end(), base.begin());
    JetPoint21 jp = jet_point_from_jet(src(base), base);
    OrbitRankResult r = prolong_orbit_rank(jp, g.seed);
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "orbit-rank";
    j["equation"] = e.name == "(command line)" ? e.expr_text : e.name;
    j["base"] = base;
    j["rank"] = r.rank;
    j["threshold_stable"] = r.threshold_stable;
    int rc = r.threshold_stable ? 0 : 1;
    if (expect >= 0) {
        j["expected"] = expect;
        if (r.rank != expect) rc = 1;
    }
    emit(g, j);
    return rc;
}

int run_ma_quartic(const GlobalOpts& g, const MACoeffs& c) {
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "ma-quartic";
    j["coefficients"] = {{"eps", c.eps}, {"h", c.h},   {"g", c.g},
                         {"s", c.s},     {"tau", c.tau}, {"nu", c.nu}};
    j["quartic"] = ma_quartic(c);
    bool on_slice = c.eps == 1.0 && c.h == std::array<double, 3>{} && c.g == std::array<double, 3>{};
    if (on_slice) j["quartic_reduced"] = ma_quartic_reduced(c);
    emit(g, j);
    return 0;
}

int run_heavenly(const GlobalOpts& g, double alpha, double gamma) {
    HeavenlyReduction r = heavenly_travelling_wave(alpha, gamma);
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "heavenly";
    j["alpha"] = alpha;
    j["gamma"] = gamma;
    j["quartic"] = r.quartic;
    j["degenerate"] = r.degenerate;
    j["coefficients"] = {{"eps", r.coeffs.eps}, {"g", r.coeffs.g}, {"nu", r.coeffs.nu}};
    emit(g, j);
    return 0;
}

int run_reduce(const GlobalOpts& g, const EquationOpts& eq, int n, int steps, double h,
               const std::vector<double>& mu0, double mu_slope, double amp,
               const std::vector<double>& branch, const std::string& dump) {
    CorpusEntry e = resolve_entry(g, eq);
    if (!e.evolutionary)
        throw CLI::ValidationError("--corpus", "reduce needs an evolutionary equation");
    Expr f = entry_expr(e);
    GTBoundary bd;
    bd.base = middle(e.box);
    for (int i = 0; i < n; ++i) {
        static constexpr double kDefaultMu[3] = {0.8, -2.2, 2.6};
        double m0 = mu0.size() == static_cast<size_t>(n) ? mu0[static_cast<size_t>(i)]
                                                         : kDefaultMu[i];
        bd.mu_axis[static_cast<size_t>(i)] = [m0, mu_slope](double r) { return m0 + mu_slope * r; };
        bd.da_axis[static_cast<size_t>(i)] = [amp](double) { return amp; };
        if (branch.size() == static_cast<size_t>(n))
            bd.lambda_branch[static_cast<size_t>(i)] = branch[static_cast<size_t>(i)];
    }
    GTGrid grid = gt_integrate(f, n, bd, steps, h);
    BisecantReport br = bisecant_check(grid, f);
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "reduce";
    j["equation"] = e.name == "(command line)" ? e.expr_text : e.name;
    j["n"] = n;
    j["steps"] = steps;
    j["h"] = h;
    j["max_dispersion_residual"] = grid.max_dispersion_residual();
    j["bisecant"] = {{"max_rank_measure", br.max_rank_measure},
                     {"max_model_mismatch", br.max_model_mismatch},
                     {"max_f_residual", br.max_f_residual}};
    emit(g, j);
    if (!dump.empty()) {
        FILE* out = dump == "-" ? stdout : std::fopen(dump.c_str(), "w");
        if (!out) throw CLI::ValidationError("--dump", "cannot open " + dump);
        std::fprintf(out, "# i j k a b c p q f mu1 mu2 mu3 lam1 lam2 lam3 da1 da2 da3 disp\n");
        int nk = n == 3 ? steps + 1 : 1;
        for (int i = 0; i <= steps; ++i)
            for (int jj = 0; jj <= steps; ++jj)
                for (int k = 0; k < nk; ++k) {
                    const GTNode& nd = grid.at(i, jj, k);
                    std::fprintf(out, "%d %d %d", i, jj, k);
                    for (double v : nd.fields) std::fprintf(out, " %.12g", v);
                    std::fprintf(out, " %.12g", nd.fslot);
                    for (double v : nd.mu) std::fprintf(out, " %.12g", v);
                    for (double v : nd.lam) std::fprintf(out, " %.12g", v);
                    for (double v : nd.da) std::fprintf(out, " %.12g", v);
                    double worst = 0.0;
                    for (double v : nd.disp_residual) worst = std::max(worst, std::abs(v));
                    std::fprintf(out, " %.3e\n", worst);
                }
        if (out != stdout) std::fclose(out);
    }
    return 0;
}

int run_corpus_cmd(const GlobalOpts& g, const std::string& only) {
    Json j = report_header(g.seed, make_config(g));
    j["command"] = "corpus";
    Json entries = Json::array();
    bool all_pass = true;
    bool numeric_failure = false;
    for (const auto& e : load_entries(g)) {
        if (!only.empty() && e.name != only) continue;
        EntryAnalysis a = analyze_entry(e, g.seed, make_config(g));
        if (!a.pass) all_pass = false;
        entries.push_back(to_json(a));
    }
    if (entries.empty())
        throw CLI::ValidationError("--entry", "no corpus entry named '" + only + "'");
    j["entries"] = entries;
    j["all_pass"] = all_pass;
    emit(g, j);
    if (numeric_failure) return 3;
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integrability workbench for second-order dispersionless PDEs"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--tol", g.tol, "integrable-verdict tolerance")->capture_default_str();
    app.add_flag("--json", g.json, "emit the report as JSON");
    app.add_option("--points", g.points, "number of base points")->capture_default_str();
    app.add_option("--triples", g.triples, "number of conic-point triples")->capture_default_str();
    app.add_option("--corpus-file", g.corpus_file, "override the built-in corpus file");

    EquationOpts eq_check, eq_thirds, eq_geom, eq_sym, eq_orbit, eq_reduce;
    std::vector<double> thirds_at, orbit_at;
    int orbit_expect = -1;

    auto* c_check = app.add_subcommand("check", "integrability verdict by hydrodynamic reductions");
    add_equation_opts(c_check, eq_check);

    auto* c_thirds = app.add_subcommand("thirds", "solve the 35 third derivatives at a point");
    add_equation_opts(c_thirds, eq_thirds);
    c_thirds->add_option("--at", thirds_at, "base point a b c p q")->expected(5);

    auto* c_geom = app.add_subcommand("geometry", "conformal metric and cubic form identities");
    add_equation_opts(c_geom, eq_geom);

    auto* c_sym = app.add_subcommand("symmetries", "symmetry dimension inside the equivalence algebra");
    add_equation_opts(c_sym, eq_sym);

    auto* c_orbit = app.add_subcommand("orbit-rank", "prolonged generator rank at a 2-jet");
    add_equation_opts(c_orbit, eq_orbit);
    c_orbit->add_option("--at", orbit_at, "base point a b c p q")->expected(5);
    c_orbit->add_option("--expect", orbit_expect, "expected rank");

    MACoeffs mac;
    auto* c_ma = app.add_subcommand("ma-quartic", "degree-4 linearizability polynomial");
    c_ma->add_option("--eps", mac.eps, "determinant coefficient");
    c_ma->add_option("--h1", mac.h[0]);
    c_ma->add_option("--h2", mac.h[1]);
    c_ma->add_option("--h3", mac.h[2]);
    c_ma->add_option("--g1", mac.g[0]);
    c_ma->add_option("--g2", mac.g[1]);
    c_ma->add_option("--g3", mac.g[2]);
    c_ma->add_option("--s1", mac.s[0]);
    c_ma->add_option("--s2", mac.s[1]);
    c_ma->add_option("--s3", mac.s[2]);
    c_ma->add_option("--tau1", mac.tau[0]);
    c_ma->add_option("--tau2", mac.tau[1]);
    c_ma->add_option("--tau3", mac.tau[2]);
    c_ma->add_option("--nu", mac.nu, "constant term");

    double hv_alpha = 1.0, hv_gamma = 1.0;
    auto* c_hv = app.add_subcommand("heavenly", "travelling-wave reduction of the heavenly equation");
    c_hv->add_option("--alpha", hv_alpha)->capture_default_str();
    c_hv->add_option("--gamma", hv_gamma)->capture_default_str();

    int rd_n = 2, rd_steps = 10;
    double rd_h = 0.01, rd_mu_slope = 0.02, rd_amp = 0.1;
    std::vector<double> rd_mu0, rd_branch;
    std::string rd_dump;
    auto* c_red = app.add_subcommand("reduce", "march an n-component Goursat grid");
    add_equation_opts(c_red, eq_reduce);
    c_red->add_option("--n", rd_n, "number of components (2 or 3)")->capture_default_str();
    c_red->add_option("--steps", rd_steps, "steps per axis")->capture_default_str();
    c_red->add_option("--step", rd_h, "step size")->capture_default_str();
    c_red->add_option("--mu", rd_mu0, "axis values of mu^i at the origin")->expected(2, 3);
    c_red->add_option("--mu-slope", rd_mu_slope, "slope of the mu Goursat data")
        ->capture_default_str();
    c_red->add_option("--amp", rd_amp, "d_i a gauge amplitude")->capture_default_str();
    c_red->add_option("--branch", rd_branch, "lambda branch signs")->expected(2, 3);
    c_red->add_option("--dump", rd_dump, "write grid nodes as columnar text ('-' = stdout)");

    std::string corpus_only;
    auto* c_corpus = app.add_subcommand("corpus", "run every corpus entry against expectations");
    c_corpus->add_option("--entry", corpus_only, "run a single named entry");

    for (auto* sc : app.get_subcommands(nullptr)) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (c_check->parsed()) return run_check(g, eq_check);
        if (c_thirds->parsed()) return run_thirds(g, eq_thirds, thirds_at);
        if (c_geom->parsed()) return run_geometry(g, eq_geom);
        if (c_sym->parsed()) return run_symmetries(g, eq_sym);
        if (c_orbit->parsed()) return run_orbit_rank(g, eq_orbit, orbit_at, orbit_expect);
        if (c_ma->parsed()) return run_ma_quartic(g, mac);
        if (c_hv->parsed()) return run_heavenly(g, hv_alpha, hv_gamma);
        if (c_red->parsed())
            return run_reduce(g, eq_reduce, rd_n, rd_steps, rd_h, rd_mu0, rd_mu_slope, rd_amp,
                              rd_branch, rd_dump);
        if (c_corpus->parsed()) return run_corpus_cmd(g, corpus_only);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
