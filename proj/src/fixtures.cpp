#include "crforge/fixtures.hpp"

#include <map>
#include <sstream>

namespace crforge {

namespace {

constexpr int kPrec = 8;

ComplexRational two_i() { return ComplexRational(mpq_class(0), mpq_class(2)); }
ComplexRational minus_two_i() { return ComplexRational(mpq_class(0), mpq_class(-2)); }

mpz_class factorial_z(int k) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
    return f;
}

/* ---- manifold builders (Q-space: z[0,n) chi[n,2n) tau[2n,2n+d)) ---- */

GenericSubmanifoldNF heisenberg_m() {
    TruncatedSeries q(3, kPrec);
    q.add_term(MultiIndex{0, 0, 1}, rat(1));
    q.add_term(MultiIndex{1, 1, 0}, two_i());
    return make_manifold(1, 1, {q});
}

GenericSubmanifoldNF flat_factor_m() {
    TruncatedSeries q1(4, kPrec), q2(4, kPrec);
    q1.add_term(MultiIndex{0, 0, 1, 0}, rat(1));
    q1.add_term(MultiIndex{1, 1, 0, 0}, two_i());
    q2.add_term(MultiIndex{0, 0, 0, 1}, rat(1));
    return make_manifold(1, 2, {q1, q2});
}

GenericSubmanifoldNF cross_quartic_m() {
    TruncatedSeries q1(6, kPrec), q2(6, kPrec);
    q1.add_term(MultiIndex{0, 0, 0, 0, 1, 0}, rat(1));
    q1.add_term(MultiIndex{1, 1, 1, 1, 0, 0}, two_i());
    q2.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, rat(1));
    q2.add_term(MultiIndex{2, 2, 2, 2, 0, 0}, two_i());
    return make_manifold(2, 2, {q1, q2});
}

GenericSubmanifoldNF signature_pair_m() {
    TruncatedSeries q1(6, kPrec), q2(6, kPrec);
    q1.add_term(MultiIndex{0, 0, 0, 0, 1, 0}, rat(1));
    q1.add_term(MultiIndex{1, 0, 1, 0, 0, 0}, two_i());
    q1.add_term(MultiIndex{0, 1, 0, 1, 0, 0}, minus_two_i());
    q2.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, rat(1));
    q2.add_term(MultiIndex{2, 0, 2, 0, 0, 0}, two_i());
    q2.add_term(MultiIndex{0, 2, 0, 2, 0, 0}, minus_two_i());
    return make_manifold(2, 2, {q1, q2});
}

/* Hypersurface in three variables given by a cleared-denominator defining
 * polynomial whose graph form divides by the unit 1 + z1*chi2 at load time.
 * Variables: Z = (z1, z2, w) in slots 0..2, zeta = (chi1, chi2, tau) in
 * slots 3..5; the series below is purely real in the paired sense. */
DefiningData unit_denominator_def() {
    TruncatedSeries r(6, kPrec);
    ComplexRational i1(mpq_class(0), mpq_class(1));
    ComplexRational mi1(mpq_class(0), mpq_class(-1));
    r.add_term(MultiIndex{0, 0, 1, 0, 0, 0}, i1);
    r.add_term(MultiIndex{1, 0, 1, 0, 1, 0}, i1);
    r.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, mi1);
    r.add_term(MultiIndex{0, 1, 0, 1, 0, 1}, mi1);
    r.add_term(MultiIndex{1, 0, 0, 1, 0, 0}, rat(2));
    r.add_term(MultiIndex{2, 0, 0, 1, 1, 0}, rat(2));
    r.add_term(MultiIndex{1, 1, 0, 2, 0, 0}, rat(2));
    r.add_term(MultiIndex{2, 1, 0, 2, 1, 0}, rat(2));
    return make_defining(3, 1, {r});
}

/* ---- map builders (source variables: z[0,n) w[n,n+d)) ---- */

FormalMapNF dilation2_map() {
    TruncatedSeries f = scale(TruncatedSeries::variable(2, 0, kPrec), rat(2));
    TruncatedSeries g = scale(TruncatedSeries::variable(2, 1, kPrec), rat(4));
    return make_map(1, 1, 1, 1, {f}, {g});
}

/* z -> z*s(w), w -> w*s(w) with s the truncated geometric series in w */
FormalMapNF moebius1_map() {
    TruncatedSeries s(2, kPrec);
    for (int k = 0; k <= kPrec; ++k) s.add_term(MultiIndex{0, k}, rat(1));
    TruncatedSeries f = mul(TruncatedSeries::variable(2, 0, kPrec), s);
    TruncatedSeries g = mul(TruncatedSeries::variable(2, 1, kPrec), s);
    return make_map(1, 1, 1, 1, {f}, {g});
}

FormalMapNF bad_quadratic_map() {
    TruncatedSeries f = TruncatedSeries::variable(2, 0, kPrec);
    TruncatedSeries g = TruncatedSeries::variable(2, 1, kPrec);
    g.add_term(MultiIndex{0, 2}, rat(1));
    return make_map(1, 1, 1, 1, {f}, {g});
}

/* (z, w1, w2) -> (z, w1, w2 + sum k! w2^k): reparametrizes the flat factor */
FormalMapNF flat_reparam_map() {
    TruncatedSeries f = TruncatedSeries::variable(3, 0, kPrec);
    TruncatedSeries g1 = TruncatedSeries::variable(3, 1, kPrec);
    TruncatedSeries g2 = TruncatedSeries::variable(3, 2, kPrec);
    for (int k = 2; k <= kPrec; ++k) {
        MultiIndex m{0, 0, 0};
        m[2] = k;
        g2.add_term(m, ComplexRational(mpq_class(factorial_z(k))));
    }
    return make_map(1, 2, 1, 2, {f}, {g1, g2});
}

/* the truncated exponential of a series vanishing at the origin */
TruncatedSeries exp_of(const TruncatedSeries& f) {
    TruncatedSeries e = TruncatedSeries::constant(f.nvars, f.prec, rat(1));
    for (int j = 1; j <= f.prec; ++j) {
        mpq_class inv_fact = mpq_class(1) / mpq_class(factorial_z(j));
        e = add(e, scale(pow_series(f, j), ComplexRational(inv_fact)));
    }
    return e;
}

/* (z1, z2, w) -> (z1 e^{u(z1)}, z2 e^{-u(z1)}, w1, w2) with a divergent u */
FormalMapNF exp_shear_map() {
    TruncatedSeries u(4, kPrec);
    for (int k = 1; k <= kPrec; ++k) {
        MultiIndex m{0, 0, 0, 0};
        m[0] = k;
        u.add_term(m, ComplexRational(mpq_class(factorial_z(k))));
    }
    TruncatedSeries f1 = mul(TruncatedSeries::variable(4, 0, kPrec), exp_of(u));
    TruncatedSeries f2 = mul(TruncatedSeries::variable(4, 1, kPrec), exp_of(negate(u)));
    TruncatedSeries g1 = TruncatedSeries::variable(4, 2, kPrec);
    TruncatedSeries g2 = TruncatedSeries::variable(4, 3, kPrec);
    return make_map(2, 2, 2, 2, {f1, f2}, {g1, g2});
}

/* (z1, z2, w) -> (u(z1), u(z1), 0, 0): collapses onto the diagonal */
FormalMapNF collapse_diagonal_map() {
    TruncatedSeries u(4, kPrec);
    for (int k = 1; k <= kPrec; ++k) {
        MultiIndex m{0, 0, 0, 0};
        m[0] = k;
        u.add_term(m, ComplexRational(mpq_class(factorial_z(k))));
    }
    TruncatedSeries zero = TruncatedSeries::zero(4, kPrec);
    return make_map(2, 2, 2, 2, {u, u}, {zero, zero});
}

std::vector<std::string> target_z_names(int np) {
    std::vector<std::string> names;
    for (int p = 0; p < np; ++p) names.push_back("z" + std::to_string(p + 1));
    return names;
}

}  // namespace

const std::vector<FixtureEntry>& fixture_registry() {
    static const std::vector<FixtureEntry> reg = [] {
        std::vector<FixtureEntry> v;
        v.push_back({"heisenberg", "manifold", "", "", emit_manifold(heisenberg_m())});
        v.push_back({"flat-factor", "manifold", "", "", emit_manifold(flat_factor_m())});
        v.push_back({"cross-quartic", "manifold", "", "", emit_manifold(cross_quartic_m())});
        v.push_back({"signature-pair", "manifold", "", "", emit_manifold(signature_pair_m())});
        v.push_back(
            {"unit-denominator", "manifold", "", "", emit_manifold(unit_denominator_def())});
        v.push_back({"identity", "map", "heisenberg", "heisenberg",
                     emit_map(identity_map(1, 1, kPrec))});
        v.push_back({"dilation-2", "map", "heisenberg", "heisenberg", emit_map(dilation2_map())});
        v.push_back({"moebius-1", "map", "heisenberg", "heisenberg", emit_map(moebius1_map())});
        v.push_back(
            {"bad-quadratic", "map", "heisenberg", "heisenberg", emit_map(bad_quadratic_map())});
        v.push_back(
            {"flat-reparam", "map", "flat-factor", "flat-factor", emit_map(flat_reparam_map())});
        v.push_back(
            {"exp-shear", "map", "cross-quartic", "cross-quartic", emit_map(exp_shear_map())});
        v.push_back({"collapse-diagonal", "map", "signature-pair", "signature-pair",
                     emit_map(collapse_diagonal_map())});
        return v;
    }();
    return reg;
}

const FixtureEntry* find_fixture(const std::string& name) {
    for (const auto& e : fixture_registry())
        if (e.name == name) return &e;
    return nullptr;
}

std::string fixture_verdict_line(const FixtureEntry& e, uint64_t seed) {
    std::ostringstream o;
    if (e.kind == "manifold") {
        GenericSubmanifoldNF m = parse_manifold_text(e.text).to_normal_form();
        TypeReport t = finite_type_test(m, -1, seed);
        EssFinReport ef = essential_finiteness_test(m, 5);
        bool segre_ok = true;
        for (int k = 1; k <= 4; ++k) segre_ok = segre_ok && verify_segre_identity(m, k);
        o << e.name << " [manifold n=" << m.n << " d=" << m.d << "] finite_type=";
        switch (t.status) {
            case TypeReport::Status::Yes:
                o << "yes k1=" << t.k1;
                break;
            case TypeReport::Status::NoUpTo:
                o << "no no_up_to=" << t.no_up_to;
                if (t.symbolic) o << " certificate=symbolic";
                break;
            case TypeReport::Status::Inconclusive:
                o << "inconclusive";
                break;
        }
        o << " essentially_finite=";
        if (ef.essentially_finite()) {
            o << "yes codim=" << ef.staircase.codim;
        } else {
            o << "undetermined";
            if (ef.curve) {
                o << " curve=(";
                for (size_t j = 0; j < ef.curve->mu.size(); ++j) {
                    if (j) o << ", ";
                    o << series_to_string(ef.curve->mu[j], {"s"});
                }
                o << ") curve_order=" << ef.curve->verified_through;
            }
        }
        o << " segre_identity=" << (segre_ok ? "ok" : "FAIL");
    } else {
        GenericSubmanifoldNF ms =
            parse_manifold_text(find_fixture(e.source)->text).to_normal_form();
        GenericSubmanifoldNF mt =
            parse_manifold_text(find_fixture(e.target)->text).to_normal_form();
        FormalMapNF h = parse_map_text(e.text);
        MapCheckReport c = check_sends(ms, mt, h);
        o << e.name << " [map " << e.source << "->" << e.target << "] sends="
          << (c.sends ? "yes" : "no") << " order=" << c.order;
        SegreHomReport s = segre_injectivity_test(ms, mt, h);
        o << " segre_hom=";
        switch (s.status) {
            case SegreHomReport::Status::Injective:
                o << "injective rank=" << s.rank;
                break;
            case SegreHomReport::Status::NotInjective:
                o << "not_injective relation="
                  << series_to_string(*s.relation, target_z_names(h.np));
                break;
            case SegreHomReport::Status::Inconclusive:
                o << "inconclusive";
                break;
        }
    }
    return o.str();
}

std::string fixtures_table(uint64_t seed) {
    std::ostringstream o;
    for (const auto& e : fixture_registry()) o << fixture_verdict_line(e, seed) << "\n";
    return o.str();
}

std::string fixtures_golden() {
    return R"(heisenberg [manifold n=1 d=1] finite_type=yes k1=2 essentially_finite=yes codim=1 segre_identity=ok
flat-factor [manifold n=1 d=2] finite_type=no no_up_to=3 certificate=symbolic essentially_finite=yes codim=1 segre_identity=ok
cross-quartic [manifold n=2 d=2] finite_type=yes k1=3 essentially_finite=undetermined curve=((1)*s, 0) curve_order=16 segre_identity=ok
signature-pair [manifold n=2 d=2] finite_type=yes k1=2 essentially_finite=yes codim=1 segre_identity=ok
unit-denominator [manifold n=2 d=1] finite_type=yes k1=2 essentially_finite=undetermined curve=(0, (1)*s) curve_order=8 segre_identity=ok
identity [map heisenberg->heisenberg] sends=yes order=8 segre_hom=injective rank=1
dilation-2 [map heisenberg->heisenberg] sends=yes order=8 segre_hom=injective rank=1
moebius-1 [map heisenberg->heisenberg] sends=yes order=8 segre_hom=injective rank=1
bad-quadratic [map heisenberg->heisenberg] sends=no order=8 segre_hom=injective rank=1
flat-reparam [map flat-factor->flat-factor] sends=yes order=8 segre_hom=injective rank=1
exp-shear [map cross-quartic->cross-quartic] sends=yes order=8 segre_hom=injective rank=2
collapse-diagonal [map signature-pair->signature-pair] sends=yes order=8 segre_hom=not_injective relation=(-1)*z2 + (1)*z1
)";
}

FixtureRun fixtures_run(const std::string& selection, uint64_t seed) {
    std::vector<const FixtureEntry*> picked;
    if (selection == "all") {
        for (const auto& e : fixture_registry()) picked.push_back(&e);
    } else {
        const FixtureEntry* e = find_fixture(selection);
        if (!e) throw series_error("fixtures: unknown fixture \"" + selection + "\"");
        picked.push_back(e);
    }
    std::map<std::string, std::string> golden;
    {
        std::istringstream in(fixtures_golden());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            golden[line.substr(0, line.find(' '))] = line;
        }
    }
    FixtureRun run;
    std::ostringstream diff;
    for (const FixtureEntry* e : picked) {
        std::string line = fixture_verdict_line(*e, seed);
        run.lines.push_back(line);
        auto it = golden.find(e->name);
        const std::string expected =
            it == golden.end() ? std::string("(missing from the golden table)") : it->second;
        if (expected != line) {
            diff << "fixture " << e->name << ":\n";
            diff << "  expected: " << expected << "\n";
            diff << "  computed: " << line << "\n";
        }
    }
    run.diff = diff.str();
    run.match = run.diff.empty();
    return run;
}

}  // namespace crforge
