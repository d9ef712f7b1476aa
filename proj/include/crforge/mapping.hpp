#pragma once

#include <string>

#include "ideal.hpp"
#include "manifold.hpp"

namespace crforge {

/* Formal map H = (F, G) between graph submanifolds, written in the source
 * variables (z, w): z = slots [0, n), w = slots [n, n + d).  F carries the
 * n' target z'-components and G the d' target w'-components; all components
 * vanish at the origin. */
struct FormalMapNF {
    int n = 0, d = 0;   /* source dimensions */
    int np = 0, dp = 0; /* target dimensions */
    SeriesTuple F;      /* n' components in (z, w) */
    SeriesTuple G;      /* d' components in (z, w) */

    int svars() const { return n + d; }
    int prec() const { return std::min(tuple_prec(F), tuple_prec(G)); }
};

/* Validates component counts, variable spaces, and zero constant terms. */
FormalMapNF make_map(int n, int d, int np, int dp, SeriesTuple F, SeriesTuple G);

FormalMapNF identity_map(int n, int d, int prec);

/* outer after inner; requires inner target dims == outer source dims.  The
 * composition is truncated to the common validity order. */
FormalMapNF compose_map(const FormalMapNF& outer, const FormalMapNF& inner);

/* Derivatives at the origin: entry c is the value of d^beta applied to the
 * c-th component of (F, G) at 0, i.e. coefficient(beta) * beta!. */
std::vector<ComplexRational> map_jet(const FormalMapNF& h, const MultiIndex& beta);

/* z -> F(z, 0): the restriction of the z'-components to the w = 0 slice,
 * returned in the n source z-variables. */
SeriesTuple segre_restriction(const FormalMapNF& h);

/* All np + dp components (F then G) embedded into the full source space of
 * 2(n+d) variables: plain keeps the (z, w) argument slots; conjugated takes
 * coefficient conjugates and moves the argument slots to the (chi, tau)
 * block. */
SeriesTuple map_graph_full(const FormalMapNF& h, bool conjugated);

/* ---- the sends-into check ---- */

struct MapCheckReport {
    bool sends = false;
    int order = 0;       /* congruence verified through this order */
    SeriesTuple residual; /* d' series in source (z, chi, tau); zero iff sends */
};

/* H sends M into M' exactly when Gbar(chi, tau) - Qbar'(Fbar(chi, tau),
 * F(z, w), G(z, w)) lies in the ideal of M componentwise; the residual below
 * is that expression reduced against the source graph substitution. */
MapCheckReport check_sends(const GenericSubmanifoldNF& m, const GenericSubmanifoldNF& mp,
                           const FormalMapNF& h);

/* ---- finiteness of a component family ---- */

struct FiniteMapReport {
    StaircaseReport staircase;
    std::optional<CurveWitness> curve; /* a curve annihilating the components, when found */
    bool finite() const { return staircase.finite(); }
};

/* Codimension of the ideal generated by the components (which must vanish at
 * the origin); a curve witness is attached when the verdict is Undetermined
 * and a monomial curve through the fiber exists within the search bounds. */
FiniteMapReport finite_map_test(const SeriesTuple& components, int degree_bound = -1);

/* ---- injectivity of the induced substitution homomorphism ---- */

struct SegreHomReport {
    enum class Status { Injective, NotInjective, Inconclusive };
    Status status = Status::Inconclusive;
    int rank = -1;           /* generic rank of z -> F(z, 0) */
    int relation_bound = 0;  /* degree bound used in the relation search */
    std::optional<RankResult> rank_certificate;      /* full-rank route */
    std::optional<StaircaseReport> finiteness;       /* finite-map route */
    std::optional<TruncatedSeries> relation;         /* h with h(F(z, 0)) == 0 */
    bool injective() const { return status == Status::Injective; }
};

/* Decides what truncated data can decide: Injective when z -> F(z, 0) has
 * full generic rank n' or generates an ideal of finite codimension;
 * NotInjective when a nonzero polynomial relation h of degree <= bound with
 * h(F(z, 0)) == 0 through the validity order is found (h is re-verified by
 * substitution); otherwise Inconclusive. */
SegreHomReport segre_injectivity_test(const GenericSubmanifoldNF& m,
                                      const GenericSubmanifoldNF& mp, const FormalMapNF& h,
                                      int relation_degree_bound = 4);

/* ---- degeneracy diagnostics ---- */

struct DegeneracyReport {
    bool degenerate = false;
    TruncatedSeries determinant; /* det of the z-Jacobian of F(z, 0); the witness when nonzero */
};

/* Requires n == n'.  The map is totally degenerate when the Jacobian
 * determinant of z -> F(z, 0) vanishes identically through validity. */
DegeneracyReport total_degeneracy_test(const GenericSubmanifoldNF& m,
                                       const GenericSubmanifoldNF& mp, const FormalMapNF& h);

/* A formal holomorphic vector field X = sum a_i(x) d/dx_i with polynomial
 * coefficients of total degree <= coeff_degree_bound (default: half the
 * validity order) satisfying X f_j == 0 through validity for every component,
 * found by an exact linear solve and re-verified by application; nullopt when
 * the bounded ansatz only has the trivial solution. */
std::optional<FormalVectorField> kernel_vector_field(const SeriesTuple& f,
                                                     int coeff_degree_bound = -1);

/* ---- the hypersurface alternative ---- */

struct DichotomyReport {
    enum class Status { ZeroMap, SegreInjective, Violation };
    Status status = Status::Violation;
    std::optional<StaircaseReport> evidence; /* finiteness of z -> F(z, 0) */
    SeriesTuple curve;                       /* candidate curve inside the target, on Violation */
    std::string detail;
};

/* For hypersurfaces (d = d' = 1), an essentially finite source, and a map
 * verified to send M into M': either H vanishes identically, or z -> F(z, 0)
 * is certified finite (so the induced substitution homomorphism is
 * injective).  A Violation report means the alternative could not be
 * certified from the truncated data; when G == 0 but F != 0 it carries a
 * candidate curve s -> (F(c(s)), 0) inside the target.  Precondition
 * failures throw with a named message. */
DichotomyReport hypersurface_dichotomy(const GenericSubmanifoldNF& m,
                                       const GenericSubmanifoldNF& mp, const FormalMapNF& h);

}  // namespace crforge
