#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crforge/ideal.hpp"

using namespace crforge;

namespace {

constexpr int D = 8;

TruncatedSeries var(int nv, int slot) { return TruncatedSeries::variable(nv, slot, D); }

}  // namespace

TEST_CASE("membership: explicit cofactor identity is found and rechecked") {
    /* hand identity: v1^4 + u^3 v1 = (v1^2 - u v2)(v1^2 + u v2) + u^2 (v2^2 + u v1) */
    const int nv = 3; /* u, v1, v2 */
    TruncatedSeries u = var(nv, 0), v1 = var(nv, 1), v2 = var(nv, 2);
    TruncatedSeries f1 = add(mul(v1, v1), mul(u, v2));
    TruncatedSeries f2 = add(mul(v2, v2), mul(u, v1));
    TruncatedSeries target = add(pow_series(v1, 4), mul(pow_series(u, 3), v1));

    /* the identity itself, as exact series arithmetic */
    TruncatedSeries lhs = add(mul(sub(mul(v1, v1), mul(u, v2)), f1), mul(mul(u, u), f2));
    CHECK(equal_on_common(lhs, target));

    SeriesIdeal ideal{{f1, f2}};
    auto wit = membership_bounded(target, ideal, 2);
    REQUIRE(wit.has_value());
    CHECK(wit->verified_through == std::min(D, 2 + 2));
    REQUIRE(wit->cofactors.size() == 2);
    TruncatedSeries recon = add(mul(wit->cofactors[0], f1), mul(wit->cofactors[1], f2));
    CHECK(is_zero_through(sub(recon, target), wit->verified_through));
}

TEST_CASE("membership: generator itself and honest failure") {
    const int nv = 3;
    TruncatedSeries u = var(nv, 0), v1 = var(nv, 1), v2 = var(nv, 2);
    SeriesIdeal ideal{{v1, v2}};

    auto self = membership_bounded(v1, ideal, 0);
    REQUIRE(self.has_value());
    CHECK(is_zero_through(sub(mul(self->cofactors[0], v1),
                              sub(v1, mul(self->cofactors[1], v2))),
                          self->verified_through));

    /* u has no multiple of v1, v2 reaching its pure-u coefficients */
    CHECK_FALSE(membership_bounded(u, ideal, 3).has_value());
    /* v1^2 - v1 is visibly in the ideal */
    CHECK(membership_bounded(sub(mul(v1, v1), v1), ideal, 1).has_value());
}

TEST_CASE("staircase: one variable") {
    TruncatedSeries z = var(1, 0);

    StaircaseReport r1 = staircase_codim(SeriesIdeal{{sub(z, mul(z, z))}}, D);
    REQUIRE(r1.finite());
    CHECK(r1.codim == 1);
    CHECK(r1.capture_degree == 1);
    REQUIRE(r1.cobasis.size() == 1);
    CHECK(r1.cobasis[0].is_zero()); /* the constant monomial */

    StaircaseReport r2 = staircase_codim(SeriesIdeal{{mul(z, z)}}, D);
    REQUIRE(r2.finite());
    CHECK(r2.codim == 2);
    CHECK(r2.capture_degree == 2);
    REQUIRE(r2.cobasis.size() == 2);
    CHECK(r2.cobasis[0].is_zero());
    CHECK(r2.cobasis[1] == MultiIndex::unit(1, 0));
}

TEST_CASE("staircase: two variables, finite and undetermined") {
    const int nv = 2;
    TruncatedSeries z1 = var(nv, 0), z2 = var(nv, 1);

    StaircaseReport fin = staircase_codim(SeriesIdeal{{z1, mul(z2, z2)}}, D);
    REQUIRE(fin.finite());
    CHECK(fin.codim == 2);
    CHECK(fin.capture_degree == 2);
    REQUIRE(fin.cobasis.size() == 2);
    CHECK(fin.cobasis[0].is_zero());
    CHECK(fin.cobasis[1] == MultiIndex::unit(nv, 1)); /* 1 and z2 */

    StaircaseReport und = staircase_codim(SeriesIdeal{{mul(z1, z2)}}, D);
    CHECK_FALSE(und.finite());
    CHECK(und.bound == D);
    CHECK(und.level_ranks.size() == static_cast<size_t>(D));

    /* a unit generator spans the whole ring */
    StaircaseReport unit =
        staircase_codim(SeriesIdeal{{add(TruncatedSeries::constant(nv, D, rat(1)), z1)}}, D);
    REQUIRE(unit.finite());
    CHECK(unit.codim == 0);

    /* the bound is clamped to the validity order */
    StaircaseReport clamped = staircase_codim(SeriesIdeal{{z1, mul(z2, z2)}}, 20);
    CHECK(clamped.bound == D);
    CHECK(clamped.codim == 2);
}

TEST_CASE("eliminate_pair: quartic from a quadratic pair") {
    /* f1 = x^2 - y z1, f2 = y^2 + x z2; resultant in x is y^4 - y z1 z2^2 and
     * its square has leading term y^8 when z2 = 0 */
    const int nv = 4; /* x, y, z1, z2 */
    TruncatedSeries x = var(nv, 0), y = var(nv, 1), z1 = var(nv, 2), z2 = var(nv, 3);
    TruncatedSeries f1 = sub(mul(x, x), mul(y, z1));
    TruncatedSeries f2 = add(mul(y, y), mul(x, z2));

    PairElimination el = eliminate_pair(f1, f2, 0, 1, {3}, 6);
    CHECK(el.n == 2);
    CHECK(el.m == 2);

    TruncatedSeries res_expected = sub(pow_series(y, 4), mul(mul(y, z1), mul(z2, z2)));
    CHECK(equal_on_common(el.resultant, res_expected));

    TruncatedSeries r_expected =
        add(sub(pow_series(y, 8),
                scale(mul(pow_series(y, 5), mul(z1, mul(z2, z2))), rat(2))),
            mul(pow_series(y, 2), mul(mul(z1, z1), pow_series(z2, 4))));
    CHECK(equal_on_common(el.r, r_expected));
    CHECK(el.shape_verified_through == D);

    REQUIRE(el.membership.has_value());
    TruncatedSeries recon =
        add(mul(el.membership->cofactors[0], f1), mul(el.membership->cofactors[1], f2));
    CHECK(is_zero_through(sub(recon, el.r), el.membership->verified_through));
    CHECK(el.membership->verified_through == D);
}

TEST_CASE("eliminate_pair: shape preconditions are enforced") {
    const int nv = 4;
    TruncatedSeries x = var(nv, 0), y = var(nv, 1), z2 = var(nv, 3);

    /* not monic in x */
    TruncatedSeries bad1 = add(scale(mul(x, x), rat(2)), y);
    CHECK_THROWS_AS(eliminate_pair(bad1, mul(y, y), 0, 1, {3}, -1), series_error);

    /* second input keeps a z2-free term besides the pure power */
    TruncatedSeries good1 = sub(mul(x, x), mul(y, z2));
    TruncatedSeries bad2 = add(mul(y, y), mul(x, y));
    CHECK_THROWS_AS(eliminate_pair(good1, bad2, 0, 1, {3}, -1), series_error);
}

TEST_CASE("monicize: single linear relation") {
    const int nv = 2; /* u, v1 */
    TruncatedSeries u = var(nv, 0), v1 = var(nv, 1);
    auto comps = monicize_system({sub(v1, u)}, 1);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].v_slot == 1);
    CHECK(comps[0].poly.degree() == 1);
    CHECK(equal_on_common(series_from_poly(comps[0].poly, 1), sub(v1, u)));
}

TEST_CASE("monicize: coordinate system stays itself") {
    const int nv = 3;
    TruncatedSeries v1 = var(nv, 1), v2 = var(nv, 2);
    auto comps = monicize_system({v1, v2}, 1);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].v_slot == 1);
    CHECK(equal_on_common(series_from_poly(comps[0].poly, 1), v1));
    CHECK(comps[1].v_slot == 2);
    CHECK(equal_on_common(series_from_poly(comps[1].poly, 2), v2));
}

TEST_CASE("monicize: coupled quadratic system yields quartic monic forms") {
    const int nv = 3; /* u, v1, v2 */
    TruncatedSeries u = var(nv, 0), v1 = var(nv, 1), v2 = var(nv, 2);
    SeriesTuple f = {add(mul(v1, v1), mul(u, v2)), add(mul(v2, v2), mul(u, v1))};

    auto comps = monicize_system(f, 1);
    REQUIRE(comps.size() == 2);

    /* v1^4 + u^3 v1, with every coefficient a series in u alone */
    CHECK(comps[0].v_slot == 1);
    CHECK(comps[0].poly.degree() == 4);
    CHECK(equal_on_common(series_from_poly(comps[0].poly, 1),
                          add(pow_series(v1, 4), mul(pow_series(u, 3), v1))));
    CHECK(comps[1].v_slot == 2);
    CHECK(equal_on_common(series_from_poly(comps[1].poly, 2),
                          add(pow_series(v2, 4), mul(pow_series(u, 3), v2))));

    for (const auto& comp : comps) {
        TruncatedSeries as_series = series_from_poly(comp.poly, comp.v_slot);
        TruncatedSeries recon = TruncatedSeries::zero(nv, D);
        for (size_t k = 0; k < f.size(); ++k)
            recon = add(recon, mul(comp.membership.cofactors[k], f[k]));
        CHECK(is_zero_through(sub(recon, as_series), comp.membership.verified_through));
        CHECK(comp.membership.verified_through == D);
    }
}

TEST_CASE("monicize: infinite-codimension restriction is rejected") {
    const int nv = 2;
    TruncatedSeries z1 = var(nv, 0), z2 = var(nv, 1);
    CHECK_THROWS_AS(monicize_system({mul(z1, z2)}, 0), series_error);
}

TEST_CASE("curve witnesses: cusp and coordinate cross") {
    const int nv = 2;
    TruncatedSeries z1 = var(nv, 0), z2 = var(nv, 1);

    /* z1^2 - z2^3 vanishes on s -> (s^3, s^2) */
    auto cusp = find_monomial_curve({sub(mul(z1, z1), pow_series(z2, 3))});
    REQUIRE(cusp.has_value());
    MultiIndex s3(1), s2(1);
    s3[0] = 3;
    s2[0] = 2;
    CHECK(cusp->mu[0].coeff(s3) == rat(1));
    CHECK(cusp->mu[0].terms.size() == 1);
    CHECK(cusp->mu[1].coeff(s2) == rat(1));
    CHECK(cusp->mu[1].terms.size() == 1);
    CHECK(cusp->verified_through >= D);

    /* z1 z2 vanishes on the first axis, found first in enumeration order */
    auto cross = find_monomial_curve({mul(z1, z2)});
    REQUIRE(cross.has_value());
    MultiIndex s1(1);
    s1[0] = 1;
    CHECK(cross->mu[0].coeff(s1) == rat(1));
    CHECK(cross->mu[0].terms.size() == 1);
    CHECK(cross->mu[1].is_zero());

    /* direct verification */
    CHECK(verify_curve({sub(mul(z1, z1), pow_series(z2, 3))}, cusp->mu).has_value());
    SeriesTuple wrong = {cusp->mu[1], cusp->mu[0]}; /* swapped */
    CHECK_FALSE(verify_curve({sub(mul(z1, z1), pow_series(z2, 3))}, wrong).has_value());
}

TEST_CASE("curve witnesses: complex coefficients and honest exhaustion") {
    const int nv = 2;
    TruncatedSeries z1 = var(nv, 0), z2 = var(nv, 1);

    /* z1^2 + z2^2 needs an imaginary slope */
    auto circle = find_monomial_curve({add(mul(z1, z1), mul(z2, z2))}, 4, 10);
    REQUIRE(circle.has_value());
    TruncatedSeries pulled = compose(add(mul(z1, z1), mul(z2, z2)), circle->mu);
    CHECK(pulled.is_zero());

    /* z1 - z2^5 has no monomial curve with exponents <= 4 */
    CHECK_FALSE(find_monomial_curve({sub(z1, pow_series(z2, 5))}, 4, 6).has_value());
}
