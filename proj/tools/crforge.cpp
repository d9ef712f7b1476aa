#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "crforge/fixtures.hpp"
#include "crforge/reflection.hpp"

using namespace crforge;

namespace {

/* exit discipline: 0 computed, 1 verdict negative, 2 inconclusive at the
 * given bounds, 3 input error */
constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInputError = 3;

struct Options {
    std::string out;
    std::uint64_t seed = 17;
    int degree = -1; /* <= 0: keep the file truncation */
};

SeriesTuple truncate_tuple(const SeriesTuple& t, int degree) {
    SeriesTuple out;
    for (const auto& f : t) out.push_back(truncate_to(f, degree));
    return out;
}

struct LoadedManifold {
    GenericSubmanifoldNF m;
    std::string mode;
};

LoadedManifold load_manifold_input(const std::string& path, int degree, Json& inputs) {
    const std::string text = read_text_file(path);
    inputs.push_back(
        Json{{"path", path}, {"kind", "manifold"}, {"digest", content_digest(text)}});
    ParsedManifold pm = parse_manifold_text(text);
    LoadedManifold lm;
    lm.mode = pm.is_normal_form() ? "normal_form" : "defining";
    if (pm.is_normal_form()) {
        lm.m = pm.nf();
    } else {
        DefiningData def = pm.defining();
        if (degree > 0 && degree < def.prec())
            def = make_defining(def.N, def.d, truncate_tuple(def.rho, degree));
        lm.m = normalize(def).m;
    }
    if (degree > 0 && degree < lm.m.prec())
        lm.m = make_manifold(lm.m.n, lm.m.d, truncate_tuple(lm.m.Q, degree));
    return lm;
}

FormalMapNF load_map_input(const std::string& path, int degree, Json& inputs) {
    const std::string text = read_text_file(path);
    inputs.push_back(Json{{"path", path}, {"kind", "map"}, {"digest", content_digest(text)}});
    FormalMapNF h = parse_map_text(text);
    if (degree > 0 && degree < h.prec())
        h = make_map(h.n, h.d, h.np, h.dp, truncate_tuple(h.F, degree),
                     truncate_tuple(h.G, degree));
    return h;
}

void require_map_dims(const FormalMapNF& h, const GenericSubmanifoldNF& m,
                      const GenericSubmanifoldNF& mp) {
    if (h.n != m.n || h.d != m.d || h.np != mp.n || h.dp != mp.d)
        throw series_error("map dimensions do not match the manifold pair");
}

Json report_header(const char* command, const Json& inputs, const Options& opt) {
    return Json{{"tool", "crforge"},
                {"command", command},
                {"inputs", inputs},
                {"seed", opt.seed},
                {"degree", opt.degree}};
}

int finish(const Options& opt, const Json& report, const std::string& summary, int rc) {
    const std::string text = dump_report(report);
    if (!opt.out.empty())
        write_text_file(opt.out, text);
    else
        std::cout << text;
    std::cerr << summary << "\n";
    return rc;
}

/* ---- JSON views of the report structs ---- */

Json tuple_payload(const SeriesTuple& t) {
    Json a = Json::array();
    for (const auto& f : t) a.push_back(series_payload(f));
    return a;
}

Json staircase_json(const StaircaseReport& st) {
    Json cobasis = Json::array();
    for (const auto& m : st.cobasis) cobasis.push_back(multi_index_json(m));
    return Json{{"status", st.finite() ? "finite" : "undetermined"},
                {"codim", st.codim},
                {"capture_degree", st.capture_degree},
                {"bound", st.bound},
                {"cobasis", cobasis},
                {"level_ranks", st.level_ranks}};
}

Json curve_json(const CurveWitness& c) {
    return Json{{"components", tuple_payload(c.mu)}, {"verified_through", c.verified_through}};
}

Json type_json(const TypeReport& t) {
    Json j{{"status", t.status == TypeReport::Status::Yes
                          ? "yes"
                          : (t.status == TypeReport::Status::NoUpTo ? "no_up_to"
                                                                    : "inconclusive")},
           {"k1", t.k1},
           {"no_up_to", t.no_up_to},
           {"full_rank", t.full_rank},
           {"ranks", t.ranks},
           {"symbolic", t.symbolic}};
    if (t.rank_point) {
        Json pt = Json::array();
        for (const auto& c : *t.rank_point) pt.push_back(complex_json(c));
        j["rank_point"] = pt;
    }
    return j;
}

Json essfin_json(const EssFinReport& ef) {
    Json j{{"status", ef.essentially_finite() ? "finite" : "undetermined"},
           {"staircase", staircase_json(ef.staircase)},
           {"alpha_bound", ef.alpha_bound},
           {"alpha_cut", ef.alpha_cut}};
    if (ef.curve) j["curve"] = curve_json(*ef.curve);
    return j;
}

Json rung_json(const LadderRung& r) {
    return Json{{"k", r.k},
                {"alpha", multi_index_json(r.alpha)},
                {"component", r.component},
                {"agreed", r.agreed},
                {"identity_verified", r.identity_verified},
                {"separation", r.separation},
                {"poly_degree", r.poly_degree},
                {"verified_through", r.verified_through}};
}

/* ---- command handlers ---- */

int run_analyze(const Options& opt, const std::string& mpath, int max_k, int alpha_bound) {
    Json inputs = Json::array();
    LoadedManifold lm = load_manifold_input(mpath, opt.degree, inputs);
    const GenericSubmanifoldNF& m = lm.m;

    TypeReport t = finite_type_test(m, max_k, opt.seed);
    EssFinReport ef = essential_finiteness_test(m, alpha_bound);
    bool segre_ok = true;
    for (int k = 1; k <= 4; ++k) segre_ok = segre_ok && verify_segre_identity(m, k);

    Json report = report_header("analyze", inputs, opt);
    report["bounds"] = Json{{"max_k", max_k}, {"alpha_bound", alpha_bound}};
    report["manifold"] =
        Json{{"mode", lm.mode}, {"n", m.n}, {"d", m.d}, {"truncation", m.prec()}};
    report["finite_type"] = type_json(t);
    report["essential_finiteness"] = essfin_json(ef);
    report["segre_identity"] = Json{{"max_k", 4}, {"ok", segre_ok}};

    std::ostringstream s;
    s << "analyze: finite_type="
      << (t.finite_type() ? "yes" : (t.status == TypeReport::Status::NoUpTo ? "no" : "inconclusive"));
    if (t.finite_type()) s << " (k1=" << t.k1 << ")";
    s << "; essentially_finite=" << (ef.essentially_finite() ? "yes" : "undetermined");
    if (ef.essentially_finite()) s << " (codim=" << ef.staircase.codim << ")";
    s << "; segre_identity=" << (segre_ok ? "ok" : "FAIL");

    int rc = kExitOk;
    if (!segre_ok) rc = kExitNegative;
    if (t.status == TypeReport::Status::Inconclusive || !ef.essentially_finite())
        rc = kExitInconclusive;
    return finish(opt, report, s.str(), rc);
}

int run_check_map(const Options& opt, const std::string& mpath, const std::string& mppath,
                  const std::string& hpath) {
    Json inputs = Json::array();
    GenericSubmanifoldNF m = load_manifold_input(mpath, opt.degree, inputs).m;
    GenericSubmanifoldNF mp = load_manifold_input(mppath, opt.degree, inputs).m;
    FormalMapNF h = load_map_input(hpath, opt.degree, inputs);
    require_map_dims(h, m, mp);

    MapCheckReport c = check_sends(m, mp, h);
    int first_failure = -1;
    for (const auto& r : c.residual)
        if (!r.is_zero()) {
            int o = r.ord();
            if (first_failure < 0 || o < first_failure) first_failure = o;
        }

    Json report = report_header("check-map", inputs, opt);
    report["sends"] = c.sends;
    report["order"] = c.order;
    report["first_failure_order"] = first_failure;
    report["residual"] = tuple_payload(c.residual);

    std::ostringstream s;
    if (c.sends)
        s << "check-map: the map sends the source into the target through order " << c.order;
    else
        s << "check-map: the congruence fails at order " << first_failure;
    return finish(opt, report, s.str(), c.sends ? kExitOk : kExitNegative);
}

int run_segre(const Options& opt, const std::string& mpath, int k, bool verify) {
    Json inputs = Json::array();
    GenericSubmanifoldNF m = load_manifold_input(mpath, opt.degree, inputs).m;
    if (k < 1) throw series_error("segre: --k must be at least 1");

    SeriesTuple v = segre_map(m, k);
    Json report = report_header("segre", inputs, opt);
    report["k"] = k;
    report["nvars"] = k * m.n;
    report["components"] = tuple_payload(v);
    bool ok = true;
    if (verify) {
        ok = verify_segre_identity(m, k);
        report["identity_ok"] = ok;
    }

    std::ostringstream s;
    s << "segre: computed the k=" << k << " mapping (" << v.size() << " components in "
      << k * m.n << " variables)";
    if (verify) s << "; identity " << (ok ? "verified" : "FAILED");
    return finish(opt, report, s.str(), ok ? kExitOk : kExitNegative);
}

int run_reflect(const Options& opt, const std::string& mpath, const std::string& mppath,
                const std::string& hpath, int r_bound) {
    Json inputs = Json::array();
    GenericSubmanifoldNF m = load_manifold_input(mpath, opt.degree, inputs).m;
    GenericSubmanifoldNF mp = load_manifold_input(mppath, opt.degree, inputs).m;
    FormalMapNF h = load_map_input(hpath, opt.degree, inputs);
    require_map_dims(h, m, mp);

    Json report = report_header("reflect", inputs, opt);
    report["bounds"] = Json{{"r_bound", r_bound}};

    MapCheckReport c = check_sends(m, mp, h);
    if (!c.sends) {
        report["status"] = "negative";
        report["detail"] = "the map does not send the source into the target";
        return finish(opt, report, "reflect: the map does not send the source into the target",
                      kExitNegative);
    }

    try {
        ReflectionIdentity id = reflection_identities(m, mp, h, r_bound);
        int through = 0;
        bool ok = verify_reflection(m, id, h, &through);
        Json comps = Json::array();
        for (const auto& mc : id.components) {
            Json coeffs = Json::array();
            for (const auto& cf : mc.poly.coeffs) coeffs.push_back(series_payload(cf));
            comps.push_back(Json{{"v_slot", mc.v_slot},
                                 {"degree", mc.poly.degree()},
                                 {"coefficients", coeffs},
                                 {"membership_verified_through", mc.membership.verified_through}});
        }
        report["status"] = ok ? "verified" : "failed";
        report["r"] = id.r;
        report["packaged_variables"] = id.system.wvars();
        report["components"] = comps;
        report["verified_through"] = through;

        std::ostringstream s;
        s << "reflect: " << id.components.size() << " monic identities at jet order r=" << id.r
          << ", substitution verified through order " << through;
        return finish(opt, report, s.str(), ok ? kExitOk : kExitNegative);
    } catch (const series_error& e) {
        report["status"] = "inconclusive";
        report["detail"] = e.what();
        return finish(opt, report, std::string("reflect: inconclusive: ") + e.what(),
                      kExitInconclusive);
    }
}

int run_determine(const Options& opt, const std::string& mpath, const std::string& mppath,
                  const std::string& h1path, const std::string& h2path, int K, int k_max,
                  int alpha_max) {
    Json inputs = Json::array();
    GenericSubmanifoldNF m = load_manifold_input(mpath, opt.degree, inputs).m;
    GenericSubmanifoldNF mp = load_manifold_input(mppath, opt.degree, inputs).m;
    FormalMapNF h1 = load_map_input(h1path, opt.degree, inputs);
    FormalMapNF h2 = load_map_input(h2path, opt.degree, inputs);
    require_map_dims(h1, m, mp);
    require_map_dims(h2, m, mp);

    DeterminationReport r = chain_agreement(m, mp, h1, h2, K, k_max, alpha_max);

    Json rungs = Json::array();
    for (const auto& rung : r.rungs) rungs.push_back(rung_json(rung));
    Json report = report_header("determine", inputs, opt);
    report["bounds"] = Json{{"K", K}, {"k_max", r.k_max}, {"alpha_max", r.alpha_max}};
    const char* status = r.status == DeterminationReport::Status::Determined
                             ? "determined"
                             : (r.status == DeterminationReport::Status::Disagreement
                                    ? "disagreement"
                                    : "agreement");
    report["status"] = status;
    report["jets_agree"] = r.jets_agree;
    report["k1"] = r.k1;
    report["detail"] = r.detail;
    report["rungs"] = rungs;
    if (r.first_disagreement) report["first_disagreement"] = rung_json(*r.first_disagreement);

    std::ostringstream s;
    s << "determine: " << status;
    if (r.first_disagreement)
        s << " (first disagreement at stage k=" << r.first_disagreement->k << ", component "
          << r.first_disagreement->component << ")";
    else if (r.status == DeterminationReport::Status::Determined)
        s << " (jets through order " << K << " pin the map; Segre stage k1=" << r.k1 << ")";

    int rc = kExitInconclusive;
    if (r.status == DeterminationReport::Status::Determined) rc = kExitOk;
    if (r.status == DeterminationReport::Status::Disagreement) rc = kExitNegative;
    return finish(opt, report, s.str(), rc);
}

int run_ledger(const Options& opt, const std::string& mpath, const std::string& mppath,
               const std::string& hpath, int k_max) {
    Json inputs = Json::array();
    GenericSubmanifoldNF m = load_manifold_input(mpath, opt.degree, inputs).m;
    GenericSubmanifoldNF mp = load_manifold_input(mppath, opt.degree, inputs).m;
    FormalMapNF h = load_map_input(hpath, opt.degree, inputs);
    require_map_dims(h, m, mp);

    Json report = report_header("ledger", inputs, opt);
    report["bounds"] = Json{{"k_max", k_max}};

    try {
        ConvergenceLedger lg = convergence_ledger(m, mp, h, k_max);
        Json entries = Json::array();
        for (const auto& e : lg.entries)
            entries.push_back(Json{{"k", e.k},
                                   {"alpha", multi_index_json(e.alpha)},
                                   {"component", e.component},
                                   {"poly_degree", e.poly_degree},
                                   {"verified_through", e.verified_through},
                                   {"verified", e.verified}});
        report["status"] = lg.all_verified() ? "verified" : "incomplete";
        report["r"] = lg.r;
        report["k_max"] = lg.k_max;
        report["alpha_max"] = lg.alpha_max;
        report["entries"] = entries;
        report["final_step_note"] = lg.final_step_note;

        std::ostringstream s;
        s << "ledger: " << lg.entries.size() << " rungs, "
          << (lg.all_verified() ? "all verified exactly" : "NOT all verified");
        return finish(opt, report, s.str(),
                      lg.all_verified() ? kExitOk : kExitInconclusive);
    } catch (const series_error& e) {
        const std::string what = e.what();
        const bool negative = what.find("does not send") != std::string::npos;
        report["status"] = negative ? "negative" : "inconclusive";
        report["detail"] = what;
        return finish(opt, report, "ledger: " + what,
                      negative ? kExitNegative : kExitInconclusive);
    }
}

int run_curve(const Options& opt, const std::string& mpath) {
    Json inputs = Json::array();
    GenericSubmanifoldNF m = load_manifold_input(mpath, opt.degree, inputs).m;

    EssFinReport ef = essential_finiteness_test(m, 5);
    Json report = report_header("curve", inputs, opt);
    report["essential_finiteness"] = essfin_json(ef);

    if (ef.curve) {
        report["status"] = "curve_found";
        std::ostringstream s;
        s << "curve: found a monomial curve annihilating the essential generators through order "
          << ef.curve->verified_through;
        return finish(opt, report, s.str(), kExitOk);
    }
    if (ef.essentially_finite()) {
        report["status"] = "essentially_finite";
        return finish(opt, report,
                      "curve: the manifold is essentially finite; no curve exists", kExitNegative);
    }
    report["status"] = "inconclusive";
    return finish(opt, report, "curve: no curve found within the search bounds",
                  kExitInconclusive);
}

int run_fixtures(const Options& opt, const std::string& action, const std::string& name) {
    Json report = report_header("fixtures", Json::array(), opt);
    report["action"] = action;
    if (action == "list") {
        Json list = Json::array();
        for (const auto& e : fixture_registry()) {
            Json j{{"name", e.name}, {"kind", e.kind}};
            if (e.kind == "map") {
                j["source"] = e.source;
                j["target"] = e.target;
            }
            list.push_back(j);
        }
        report["fixtures"] = list;
        std::ostringstream s;
        s << "fixtures: " << fixture_registry().size() << " entries";
        return finish(opt, report, s.str(), kExitOk);
    }
    /* action == "run" (validated by the option parser) */
    FixtureRun run = fixtures_run(name, opt.seed);
    report["selection"] = name;
    report["lines"] = run.lines;
    report["golden_match"] = run.match;
    report["diff"] = run.diff;
    std::ostringstream s;
    s << "fixtures: " << run.lines.size() << " verdict line(s) "
      << (run.match ? "match the golden table" : "DIFFER from the golden table");
    if (!run.match) std::cerr << run.diff;
    return finish(opt, report, s.str(), run.match ? kExitOk : kExitNegative);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact truncated-series analysis of generic submanifolds and formal maps"};
    app.fallthrough(true);
    app.require_subcommand(1);

    Options opt;
    app.add_option("--out", opt.out, "write the JSON report to this path instead of stdout");
    app.add_option("--seed", opt.seed, "seed for rational sample points (default 17)")
        ->envname("CRFORGE_SEED");
    app.add_option("--degree", opt.degree,
                   "re-truncate all inputs to this order (default: keep file truncation)")
        ->envname("CRFORGE_DEGREE");

    std::string mpath, mppath, hpath, h2path;
    int max_k = -1, alpha_bound = 5, segre_k = 0, r_bound = -1;
    int K = 0, k_max = -1, alpha_max = -1;
    bool segre_verify = false;
    std::string fixture_action, fixture_name = "all";

    CLI::App* analyze = app.add_subcommand(
        "analyze", "finite type, essential finiteness, and Segre identity checks");
    analyze->add_option("manifold", mpath, "manifold file")->required();
    analyze->add_option("--max-k", max_k, "largest Segre stage to try");
    analyze->add_option("--alpha-bound", alpha_bound, "jet-order bound for essential generators");

    CLI::App* checkmap =
        app.add_subcommand("check-map", "verify that a formal map sends source into target");
    checkmap->add_option("manifold", mpath, "source manifold file")->required();
    checkmap->add_option("target", mppath, "target manifold file")->required();
    checkmap->add_option("map", hpath, "map file")->required();

    CLI::App* segre = app.add_subcommand("segre", "compute a Segre mapping");
    segre->add_option("manifold", mpath, "manifold file")->required();
    segre->add_option("--k", segre_k, "Segre stage")->required();
    segre->add_flag("--verify", segre_verify, "also verify the defining identity");

    CLI::App* reflect =
        app.add_subcommand("reflect", "construct and verify monic reflection identities");
    reflect->add_option("manifold", mpath, "source manifold file")->required();
    reflect->add_option("target", mppath, "target manifold file")->required();
    reflect->add_option("map", hpath, "map file")->required();
    reflect->add_option("--r-bound", r_bound, "largest jet order to try");

    CLI::App* determine =
        app.add_subcommand("determine", "compare two maps rung by rung along Segre chains");
    determine->add_option("manifold", mpath, "source manifold file")->required();
    determine->add_option("target", mppath, "target manifold file")->required();
    determine->add_option("map1", hpath, "first map file")->required();
    determine->add_option("map2", h2path, "second map file")->required();
    determine->add_option("--K", K, "jet order the two maps are assumed to share")->required();
    determine->add_option("--k-max", k_max, "largest chain stage to compare");
    determine->add_option("--alpha-max", alpha_max, "largest derivative order per stage");

    CLI::App* ledger =
        app.add_subcommand("ledger", "verify every convergence rung of a map exactly");
    ledger->add_option("manifold", mpath, "source manifold file")->required();
    ledger->add_option("target", mppath, "target manifold file")->required();
    ledger->add_option("map", hpath, "map file")->required();
    ledger->add_option("--k-max", k_max, "largest chain stage");

    CLI::App* curve = app.add_subcommand(
        "curve", "search for a monomial curve annihilating the essential generators");
    curve->add_option("manifold", mpath, "manifold file")->required();

    CLI::App* fixtures = app.add_subcommand("fixtures", "built-in example files");
    fixtures->add_option("action", fixture_action, "list | run")
        ->required()
        ->check(CLI::IsMember({"list", "run"}));
    fixtures->add_option("name", fixture_name, "fixture name or \"all\" (default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (analyze->parsed()) return run_analyze(opt, mpath, max_k, alpha_bound);
        if (checkmap->parsed()) return run_check_map(opt, mpath, mppath, hpath);
        if (segre->parsed()) return run_segre(opt, mpath, segre_k, segre_verify);
        if (reflect->parsed()) return run_reflect(opt, mpath, mppath, hpath, r_bound);
        if (determine->parsed())
            return run_determine(opt, mpath, mppath, hpath, h2path, K, k_max, alpha_max);
        if (ledger->parsed()) return run_ledger(opt, mpath, mppath, hpath, k_max);
        if (curve->parsed()) return run_curve(opt, mpath);
        if (fixtures->parsed()) return run_fixtures(opt, fixture_action, fixture_name);
    } catch (const series_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
