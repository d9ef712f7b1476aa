#pragma once

#include "series_ops.hpp"

namespace crforge {

/* Finitely many series generators in a fixed variable space.  Membership and
 * codimension statements about truncated data are always order-qualified:
 * they assert congruences through a stated order, never facts about unseen
 * coefficients beyond it. */
struct SeriesIdeal {
    SeriesTuple gens;
    int nvars() const { return gens.empty() ? 0 : gens[0].nvars; }
    int prec() const { return tuple_prec(gens); }
};

struct MemberWitness {
    SeriesTuple cofactors;    /* one per generator, polynomial of bounded degree */
    int verified_through = 0; /* f == sum cofactor_k * g_k through this order */
};

/* Linear solve for polynomial cofactors of total degree <= cofactor_degree
 * with f == sum c_k g_k through min(validity, cofactor_degree + max generator
 * degree).  nullopt means "not found at this bound", which is not a
 * disproof of membership. */
std::optional<MemberWitness> membership_bounded(const TruncatedSeries& f, const SeriesIdeal& ideal,
                                                int cofactor_degree);

struct StaircaseReport {
    enum class Status { Finite, Undetermined };
    Status status = Status::Undetermined;
    int codim = -1;                  /* when Finite */
    std::vector<MultiIndex> cobasis; /* standard monomials spanning the quotient */
    int capture_degree = -1;         /* first degree level fully inside the span */
    int bound = 0;                   /* degree bound actually used */
    std::vector<int> level_ranks;    /* span rank per degree, diagnostics */

    bool finite() const { return status == Status::Finite; }
    bool operator==(const StaircaseReport& o) const {
        return status == o.status && codim == o.codim && cobasis == o.cobasis;
    }
};

/* Degree-by-degree span of monomial multiples of the generators.  Reports
 * Finite(codim) only when some full degree level m <= bound lies in the span
 * of multiples truncated at m (m at most the generator validity, so the
 * certificate does not depend on unseen coefficients) and every level between
 * m and the bound is captured as well; otherwise Undetermined. */
StaircaseReport staircase_codim(const SeriesIdeal& ideal, int degree_bound);

struct PairElimination {
    TruncatedSeries r;         /* Res^N: x-free, leading term y^(M N^2) */
    TruncatedSeries resultant; /* the plain resultant, also in the ideal */
    int n = 0, m = 0;          /* distinguished degrees of p1 and p2 */
    int shape_verified_through = 0;
    std::optional<MemberWitness> membership; /* certificate for r when requested */
};

/* Eliminate the variable x_var from the pair
 *   f1 = x^N + sum_{j<N} a_j x^j   (a_j with zero constant term),
 *   f2 = y^M + K                   (K vanishing when the z2 block is 0),
 * returning r = Res_x(f1, f2)^N, which is x-free, lies in (f1, f2), and has
 * leading term y^(M N^2) modulo the z2 block. */
PairElimination eliminate_pair(const TruncatedSeries& f1, const TruncatedSeries& f2, int x_var,
                               int y_var, const std::vector<int>& z2_vars,
                               int member_cofactor_degree = -1);

struct MonicComponent {
    int v_slot = -1; /* ambient slot of the distinguished variable */
    PolyInX poly;    /* monic in X := that variable; coefficients in the u block */
    MemberWitness membership;
};

/* Given f_1..f_q in (u, v) with u = slots [0, u_count) and I(f(0, v)) of
 * finite codimension, produce for each v_j a monic polynomial in v_j with
 * coefficients in u only, lying in (f) with an explicit cofactor witness.
 * Elimination is by Weierstrass preparation plus resultants, one v-variable
 * at a time. */
std::vector<MonicComponent> monicize_system(const SeriesTuple& f, int u_count,
                                            int member_cofactor_degree = -1);

/* compose every generator with the curve; returns the order through which all
 * vanish, or nullopt if some composition is nonzero within validity.  With
 * exact_gens the generators' term lists are taken as exhaustive polynomials,
 * so the compositions are exact through the curve's own validity order. */
std::optional<int> verify_curve(const SeriesTuple& gens, const SeriesTuple& mu,
                                bool exact_gens = false);

struct CurveWitness {
    SeriesTuple mu;
    int verified_through = 0;
};

/* Search for a nonzero monomial curve mu_j(s) = c_j s^(e_j) annihilating all
 * generators, with exponents <= max_exponent and coefficients from a fixed
 * breadth-bounded pool.  Deterministic enumeration; nullopt is honest
 * exhaustion of the bounds, not a nonexistence proof. */
std::optional<CurveWitness> find_monomial_curve(const SeriesTuple& gens, int max_exponent = 4,
                                                int breadth = 6);

}  // namespace crforge
