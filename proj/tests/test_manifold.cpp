#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crforge/manifold.hpp"
#include "crforge/series_ops.hpp"

using namespace crforge;

namespace {

constexpr int D = 8;

TruncatedSeries var(int nv, int slot) { return TruncatedSeries::variable(nv, slot, D); }
ComplexRational two_i() { return crat(0, 1, 2, 1); }

/* quadric graph in C^2: w = tau + 2i z chi */
GenericSubmanifoldNF heisenberg() {
    TruncatedSeries q(3, D);
    q.add_term(MultiIndex{0, 0, 1}, rat(1));
    q.add_term(MultiIndex{1, 1, 0}, two_i());
    return make_manifold(1, 1, {q});
}

/* product of the quadric with a flat factor in C^3 (n = 1, d = 2) */
GenericSubmanifoldNF flat_factor() {
    TruncatedSeries q1(4, D), q2(4, D);
    q1.add_term(MultiIndex{0, 0, 1, 0}, rat(1));
    q1.add_term(MultiIndex{1, 1, 0, 0}, two_i());
    q2.add_term(MultiIndex{0, 0, 0, 1}, rat(1));
    return make_manifold(1, 2, {q1, q2});
}

/* graphs carried by the monomial z1 z2 and its square (n = 2, d = 2) */
GenericSubmanifoldNF cross_quartic() {
    TruncatedSeries q1(6, D), q2(6, D);
    q1.add_term(MultiIndex{0, 0, 0, 0, 1, 0}, rat(1));
    q1.add_term(MultiIndex{1, 1, 1, 1, 0, 0}, two_i());
    q2.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, rat(1));
    q2.add_term(MultiIndex{2, 2, 2, 2, 0, 0}, two_i());
    return make_manifold(2, 2, {q1, q2});
}

/* signature-split pair |z1|^2 - |z2|^2, |z1|^4 - |z2|^4 (n = 2, d = 2) */
GenericSubmanifoldNF signature_pair() {
    TruncatedSeries q1(6, D), q2(6, D);
    q1.add_term(MultiIndex{0, 0, 0, 0, 1, 0}, rat(1));
    q1.add_term(MultiIndex{1, 0, 1, 0, 0, 0}, two_i());
    q1.add_term(MultiIndex{0, 1, 0, 1, 0, 0}, -two_i());
    q2.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, rat(1));
    q2.add_term(MultiIndex{2, 0, 2, 0, 0, 0}, two_i());
    q2.add_term(MultiIndex{0, 2, 0, 2, 0, 0}, -two_i());
    return make_manifold(2, 2, {q1, q2});
}

/* defining series for the quadric: (w - tau)/2i - z chi on (z, w, chi, tau) */
DefiningData quadric_defining() {
    TruncatedSeries r(4, D);
    r.add_term(MultiIndex{0, 1, 0, 0}, crat(0, 1, -1, 2));
    r.add_term(MultiIndex{0, 0, 0, 1}, crat(0, 1, 1, 2));
    r.add_term(MultiIndex{1, 0, 1, 0}, rat(-1));
    return make_defining(2, 1, {r});
}

/* same manifold as flat_factor, in defining form on (z, w1, w2, ..) */
DefiningData flat_factor_defining() {
    TruncatedSeries r1(6, D), r2(6, D);
    r1.add_term(MultiIndex{0, 1, 0, 0, 0, 0}, crat(0, 1, -1, 2));
    r1.add_term(MultiIndex{0, 0, 0, 0, 1, 0}, crat(0, 1, 1, 2));
    r1.add_term(MultiIndex{1, 0, 0, 1, 0, 0}, rat(-1));
    r2.add_term(MultiIndex{0, 0, 1, 0, 0, 0}, crat(0, 1, -1, 2));
    r2.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, crat(0, 1, 1, 2));
    return make_defining(3, 2, {r1, r2});
}

}  // namespace

TEST_CASE("graph constructor enforces normality and reality") {
    GenericSubmanifoldNF m = heisenberg();
    CHECK(m.prec() == D);
    CHECK(m.N() == 2);
    CHECK(m.qdim() == 3);
    CHECK(m.fdim() == 4);

    /* normality violation: a term surviving the chi = 0 slice */
    TruncatedSeries bad1(3, D);
    bad1.add_term(MultiIndex{0, 0, 1}, rat(1));
    bad1.add_term(MultiIndex{2, 0, 1}, rat(1));
    CHECK_THROWS_AS(make_manifold(1, 1, {bad1}), series_error);

    /* normal but not real: z chi needs an imaginary coefficient */
    TruncatedSeries bad2(3, D);
    bad2.add_term(MultiIndex{0, 0, 1}, rat(1));
    bad2.add_term(MultiIndex{1, 1, 0}, rat(1));
    CHECK_THROWS_AS(make_manifold(1, 1, {bad2}), series_error);
}

TEST_CASE("reduction against the graph substitution") {
    GenericSubmanifoldNF m = heisenberg();

    TruncatedSeries w_reduced = reduce_mod_m(m, var(4, m.w_slot(0)));
    CHECK(equal_through(w_reduced, m.Q[0], D));

    for (bool conj_family : {false, true})
        for (const TruncatedSeries& g : ideal_generators(m, conj_family)) {
            TruncatedSeries r = reduce_mod_m(m, g);
            CHECK(is_zero_through(r, r.prec));
        }

    /* tau * w reduces to tau * (tau + 2i z chi) */
    TruncatedSeries f = mul(var(4, m.tau_slot(0)), var(4, m.w_slot(0)));
    TruncatedSeries expect = mul(var(3, 2), m.Q[0]);
    CHECK(equal_through(reduce_mod_m(m, f), expect, D));
}

TEST_CASE("CR fields annihilate the ideal and commute") {
    GenericSubmanifoldNF m = heisenberg();
    std::vector<FormalVectorField> basis = cr_basis(m);
    REQUIRE(basis.size() == 1);
    const FormalVectorField& L = basis[0];

    /* L = d/dchi - 2i z d/dtau */
    CHECK(equal_through(L.coeff[m.chi_slot(0)], TruncatedSeries::constant(4, D, rat(1)), D));
    TruncatedSeries expect_tau(4, D);
    expect_tau.add_term(MultiIndex{1, 0, 0, 0}, -two_i());
    CHECK(equal_through(L.coeff[m.tau_slot(0)], expect_tau, D - 1));
    CHECK(is_type_01(L, m.n, m.d));
    CHECK_FALSE(is_type_10(L, m.n, m.d));

    /* conjugate-family generators are annihilated exactly, the others reduce */
    for (const TruncatedSeries& g : ideal_generators(m, true)) {
        TruncatedSeries r = apply_field(L, g);
        CHECK(is_zero_through(r, r.prec));
    }
    for (const TruncatedSeries& g : ideal_generators(m, false)) {
        TruncatedSeries r = reduce_mod_m(m, apply_field(L, g));
        CHECK(is_zero_through(r, r.prec));
    }

    /* two CR directions commute exactly */
    GenericSubmanifoldNF s = signature_pair();
    std::vector<FormalVectorField> sb = cr_basis(s);
    REQUIRE(sb.size() == 2);
    FormalVectorField br = field_bracket(sb[0], sb[1]);
    for (const TruncatedSeries& c : br.coeff) CHECK(is_zero_through(c, c.prec));
    for (const FormalVectorField& L2 : sb)
        for (const TruncatedSeries& g : ideal_generators(s, false)) {
            TruncatedSeries r = reduce_mod_m(s, apply_field(L2, g));
            CHECK(is_zero_through(r, r.prec));
        }
}

TEST_CASE("tangential frame in defining coordinates") {
    DefiningData def = quadric_defining();
    std::vector<FormalVectorField> frame = tangential_frame(def);
    REQUIRE(frame.size() == 2);

    /* S_z = d/dz - 2i chi d/dtau */
    TruncatedSeries expect(4, D);
    expect.add_term(MultiIndex{0, 0, 1, 0}, -two_i());
    CHECK(equal_through(frame[0].coeff[3], expect, D - 1));
    /* S_w = d/dw + d/dtau */
    CHECK(equal_through(frame[1].coeff[3], TruncatedSeries::constant(4, D, rat(1)), D - 1));

    /* on series without conjugate variables the frame acts as d/dZ */
    TruncatedSeries f = mul(mul(var(4, 0), var(4, 0)), var(4, 1)); /* z^2 w */
    TruncatedSeries step1 = apply_field(frame[0], f);
    CHECK(equal_through(step1, scale(mul(var(4, 0), var(4, 1)), rat(2)), step1.prec));
    TruncatedSeries step2 = apply_field(frame[1], step1);
    CHECK(equal_through(step2, scale(var(4, 0), rat(2)), step2.prec));

    /* reality is enforced */
    TruncatedSeries bad(4, D);
    bad.add_term(MultiIndex{0, 1, 0, 0}, rat(1));
    bad.add_term(MultiIndex{0, 0, 0, 1}, rat(-1));
    bad.add_term(MultiIndex{1, 0, 1, 0}, rat(-1));
    CHECK_THROWS_AS(make_defining(2, 1, {bad}), series_error);

    /* degenerate differential is rejected */
    TruncatedSeries flat(4, D);
    flat.add_term(MultiIndex{1, 0, 1, 0}, rat(1));
    CHECK_THROWS_AS(make_defining(2, 1, {flat}), series_error);
}

TEST_CASE("normalization recovers graph form") {
    SUBCASE("quadric, already straight") {
        Normalization nz = normalize(quadric_defining());
        GenericSubmanifoldNF h = heisenberg();
        CHECK(nz.m.n == 1);
        CHECK(nz.m.d == 1);
        CHECK(equal_through(nz.m.Q[0], h.Q[0], D));
        CHECK(nz.perm == std::vector<int>{0, 1});
        CHECK(equal_through(nz.new_coords[0], var(2, 0), D));
        CHECK(equal_through(nz.new_coords[1], var(2, 1), D));
    }

    SUBCASE("codimension two with a flat factor") {
        Normalization nz = normalize(flat_factor_defining());
        GenericSubmanifoldNF f = flat_factor();
        REQUIRE(nz.m.d == 2);
        CHECK(equal_through(nz.m.Q[0], f.Q[0], D));
        CHECK(equal_through(nz.m.Q[1], f.Q[1], D));
    }

    SUBCASE("permuted input columns are rearranged") {
        /* same manifold with coordinates listed (w1, z, w2) */
        TruncatedSeries r1(6, D), r2(6, D);
        r1.add_term(MultiIndex{1, 0, 0, 0, 0, 0}, crat(0, 1, -1, 2));
        r1.add_term(MultiIndex{0, 0, 0, 1, 0, 0}, crat(0, 1, 1, 2));
        r1.add_term(MultiIndex{0, 1, 0, 0, 1, 0}, rat(-1));
        r2.add_term(MultiIndex{0, 0, 1, 0, 0, 0}, crat(0, 1, -1, 2));
        r2.add_term(MultiIndex{0, 0, 0, 0, 0, 1}, crat(0, 1, 1, 2));
        Normalization nz = normalize(make_defining(3, 2, {r1, r2}));
        CHECK(nz.perm == std::vector<int>{1, 0, 2});
        GenericSubmanifoldNF f = flat_factor();
        CHECK(equal_through(nz.m.Q[0], f.Q[0], D));
        CHECK(equal_through(nz.m.Q[1], f.Q[1], D));
        /* new z is the old second coordinate */
        CHECK(equal_through(nz.new_coords[0], var(3, 1), D));
    }

    SUBCASE("curved center slice needs the square root step") {
        /* (w - tau)/2i - ((w + tau)/2)^2 - z chi */
        TruncatedSeries r(4, D);
        r.add_term(MultiIndex{0, 1, 0, 0}, crat(0, 1, -1, 2));
        r.add_term(MultiIndex{0, 0, 0, 1}, crat(0, 1, 1, 2));
        r.add_term(MultiIndex{0, 2, 0, 0}, rat(-1, 4));
        r.add_term(MultiIndex{0, 1, 0, 1}, rat(-1, 2));
        r.add_term(MultiIndex{0, 0, 0, 2}, rat(-1, 4));
        r.add_term(MultiIndex{1, 0, 1, 0}, rat(-1));
        Normalization nz = normalize(make_defining(2, 1, {r}));
        /* the factory inside normalize certifies normality + reality; the
         * coordinate change must bend the second coordinate */
        CHECK(nz.m.n == 1);
        CHECK(equal_through(nz.new_coords[0], var(2, 0), D));
        CHECK(nz.new_coords[1].coeff(MultiIndex{0, 1}) == rat(1, 2));
        CHECK(nz.new_coords[1].coeff(MultiIndex{0, 2}) == crat(0, 1, -1, 2));
    }
}

TEST_CASE("iterated graph mappings satisfy the defining identity") {
    GenericSubmanifoldNF m = heisenberg();

    SeriesTuple v1 = segre_map(m, 1);
    REQUIRE(v1.size() == 2);
    CHECK(equal_through(v1[0], var(1, 0), D));
    CHECK(v1[1].is_zero());

    SeriesTuple v2 = segre_map(m, 2);
    TruncatedSeries e2(2, D);
    e2.add_term(MultiIndex{1, 1}, two_i());
    CHECK(equal_through(v2[1], e2, D));

    SeriesTuple v3 = segre_map(m, 3);
    TruncatedSeries e3(3, D);
    e3.add_term(MultiIndex{1, 1, 0}, two_i());
    e3.add_term(MultiIndex{0, 1, 1}, -two_i());
    CHECK(equal_through(v3[1], e3, D));

    for (int k = 0; k <= 4; ++k) CHECK(verify_segre_identity(m, k));
    GenericSubmanifoldNF s = signature_pair();
    for (int k = 0; k <= 3; ++k) CHECK(verify_segre_identity(s, k));

    /* corrupted graph data violates the identity (bypasses the factory) */
    GenericSubmanifoldNF bad;
    bad.n = 1;
    bad.d = 1;
    TruncatedSeries qc(3, D);
    qc.add_term(MultiIndex{0, 0, 1}, rat(1));
    qc.add_term(MultiIndex{1, 1, 0}, two_i());
    qc.add_term(MultiIndex{2, 2, 0}, rat(1));
    bad.Q = {qc};
    CHECK_FALSE(verify_segre_identity(bad, 1));
}

TEST_CASE("finite type through iterated graph ranks") {
    SUBCASE("quadric reaches full rank at the second step") {
        TypeReport rep = finite_type_test(heisenberg());
        CHECK(rep.status == TypeReport::Status::Yes);
        CHECK(rep.k1 == 2);
        CHECK(rep.full_rank == 2);
        REQUIRE(rep.ranks.size() >= 2);
        CHECK(rep.ranks[0] == 1);
        CHECK(rep.ranks[1] == 2);
        REQUIRE(rep.rank_point.has_value());
        CHECK(rep.rank_point->size() == 4);
        /* the witness lies in the zero fiber of the doubled map */
        SeriesTuple v4 = segre_map(heisenberg(), 4);
        for (const TruncatedSeries& comp : v4)
            CHECK(eval_at_point(comp, *rep.rank_point).is_zero());
    }

    SUBCASE("flat factor never reaches full rank") {
        TypeReport rep = finite_type_test(flat_factor());
        CHECK(rep.status == TypeReport::Status::NoUpTo);
        CHECK(rep.no_up_to == 3);
        CHECK(rep.symbolic);
        for (int r : rep.ranks) CHECK(r <= 2);
    }

    SUBCASE("cross and signature graphs are of finite type") {
        TypeReport rc = finite_type_test(cross_quartic());
        CHECK(rc.status == TypeReport::Status::Yes);
        CHECK(rc.k1 <= 3);
        CHECK(rc.rank_point.has_value());

        TypeReport rs = finite_type_test(signature_pair());
        CHECK(rs.status == TypeReport::Status::Yes);
        CHECK(rs.k1 == 2);
        CHECK(rs.rank_point.has_value());
    }

    SUBCASE("short sample sweep upgraded by the symbolic pass") {
        TypeReport rep = finite_type_test(heisenberg(), 1);
        CHECK(rep.status == TypeReport::Status::Yes);
        CHECK(rep.k1 == 2);
        CHECK(rep.symbolic);
    }
}

TEST_CASE("essential generators and finiteness verdicts") {
    SUBCASE("quadric") {
        SeriesTuple gens = essential_generators(heisenberg());
        REQUIRE(!gens.empty());
        TruncatedSeries expect(1, D - 1);
        expect.add_term(MultiIndex{1}, -two_i());
        CHECK(equal_through(gens[0], expect, D - 1));
        CHECK(gens[0].prec == D - 1);

        EssFinReport rep = essential_finiteness_test(heisenberg());
        CHECK(rep.essentially_finite());
        CHECK(rep.staircase.codim == 1);
        CHECK(rep.alpha_cut == 1);
        REQUIRE(rep.staircase.cobasis.size() == 1);
        CHECK(rep.staircase.cobasis[0] == MultiIndex{0});
    }

    SUBCASE("flat factor is essentially finite but not of finite type") {
        EssFinReport rep = essential_finiteness_test(flat_factor());
        CHECK(rep.essentially_finite());
        CHECK(rep.staircase.codim == 1);
        CHECK(rep.alpha_cut == 1);
    }

    SUBCASE("cross graph fails with a curve certificate") {
        EssFinReport rep = essential_finiteness_test(cross_quartic());
        CHECK_FALSE(rep.essentially_finite());
        CHECK(rep.alpha_cut == -1);
        REQUIRE(rep.curve.has_value());
        REQUIRE(rep.curve->mu.size() == 2);
        CHECK(rep.curve->mu[0].coeff(MultiIndex{1}) == rat(1));
        CHECK(rep.curve->mu[1].is_zero());
        CHECK(rep.curve->verified_through >= D);
    }

    SUBCASE("signature pair closes at the first jet cut") {
        EssFinReport rep = essential_finiteness_test(signature_pair());
        CHECK(rep.essentially_finite());
        CHECK(rep.staircase.codim == 1);
        CHECK(rep.alpha_cut == 1);
    }

    SUBCASE("defining-coordinates route agrees with the graph route") {
        SeriesTuple gens = essential_generators_general(quadric_defining(), 3);
        REQUIRE(!gens.empty());
        /* jet order zero contributes rho(Z, 0) = -i/2 w */
        TruncatedSeries e0(2, D);
        e0.add_term(MultiIndex{0, 1}, crat(0, 1, -1, 2));
        CHECK(equal_through(gens[0], e0, D));
        /* jet order one contributes -z */
        TruncatedSeries e1(2, D - 1);
        e1.add_term(MultiIndex{1, 0}, rat(-1));
        CHECK(equal_through(gens[1], e1, D - 1));

        SeriesIdeal ideal{gens};
        StaircaseReport sr = staircase_codim(ideal, D);
        CHECK(sr.finite());
        CHECK(sr.codim == 1);

        EssFinReport graph_route = essential_finiteness_test(heisenberg());
        CHECK(graph_route.staircase.codim == sr.codim);
    }
}
