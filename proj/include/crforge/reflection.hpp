#pragma once

#include <functional>

#include "mapping.hpp"

namespace crforge {

/* ---- graph frame and iterated Segre chains ---- */

/* Frame S_1..S_N on the full space, S_j = d/dZ_j + sum_m s_{jm} d/dtau_m,
 * solved so every holomorphic generator w_l - Q_l is annihilated exactly.
 * The fields commute pairwise and act as the plain d/dZ_j on series that do
 * not involve the (chi, tau) block. */
std::vector<FormalVectorField> graph_tangent_frame(const GenericSubmanifoldNF& m);

/* Substitution tuple (Z, zeta) := (v^{k+1}(z, xi), vbar^k(xi)) realizing the
 * k-th iterated Segre chain: 2N series in (k+1)*n variables.  Every ideal
 * generator composes to zero along it. */
SeriesTuple segre_chain(const GenericSubmanifoldNF& m, int k);

/* ---- coefficient family of the conjugate graph pairing ---- */

/* Writing Qbar'_l(u, mu, t) for the conjugated target graph functions with
 * argument blocks u (first), mu (middle), t (last):
 *   Qbar'_l(u, mu, 0) = sum_alpha coeff[alpha][l](mu) u^alpha, and
 *   Qbar'_l(u, mu, t) - Qbar'_l(u, mu, 0) = sum_m remainder[l][m] t_m
 * with the remainder split exact term by term. */
struct ReflectionExpansion {
    int np = 0, dp = 0;
    std::vector<MultiIndex> alphas;   /* over np slots, graded-lex, |alpha| <= bound */
    std::vector<SeriesTuple> coeff;   /* coeff[i][l]: series in np variables */
    std::vector<std::vector<TruncatedSeries>> remainder; /* [l][m], target Q-space */
};
ReflectionExpansion expand_reflection(const GenericSubmanifoldNF& mp, int alpha_bound = -1);

/* ---- jet order selection ---- */

/* Smallest r <= bound such that the ideal generated by
 *   g_beta(mu) = sum_alpha coeff_alpha(mu) * (L^beta of the conjugated
 *                first-block power product, evaluated at 0),  |beta| <= r,
 * has a finite staircase that is unchanged at r+1.  found = false reports an
 * hypothesis failure: no finite stage within the bound. */
struct JetOrderReport {
    bool found = false;
    int r = -1;
    StaircaseReport staircase;  /* evidence at the chosen r */
    SeriesTuple generators;     /* the g_beta at the chosen r, series in np vars */
    std::string detail;
};
JetOrderReport pick_r(const GenericSubmanifoldNF& mp, const FormalMapNF& h, int bound = -1);

/* ---- packaged reflection system ---- */

/* Rows R_{beta,l} in a packaged variable space holding, per jet order gamma
 * with |gamma| <= r:
 *   a_{gamma,p}: the gamma-jet of the conjugated holomorphic components minus
 *                its value at 0 (the value is recorded in jet_a),
 *   b_{gamma,l}: the gamma-jet of the conjugated transversal components
 *                (vanishing at 0 for a graph-preserving map),
 * plus mu_p / nu_m standing for the map components themselves.  Substituting
 * the actual jet series for the packaged slots lands every row and every
 * transversal relation in the source manifold ideal. */
struct ReflectionSystem {
    int n = 0, d = 0, np = 0, dp = 0, r = 0;
    std::vector<MultiIndex> gammas; /* over n slots, |gamma| <= r, graded-lex */

    int gcount() const { return static_cast<int>(gammas.size()); }
    int u_count() const { return gcount() * (np + dp); }
    int wvars() const { return u_count() + np + dp; }
    int a_slot(int gi, int p) const { return gi * np + p; }
    int b_slot(int gi, int l) const { return gcount() * np + gi * dp + l; }
    int mu_slot(int p) const { return u_count() + p; }
    int nu_slot(int m) const { return u_count() + np + m; }

    std::vector<std::vector<ComplexRational>> jet_a; /* [gi][p]: jet value at 0 */
    std::vector<SeriesTuple> rows;  /* rows[bi][l], bi indexes gammas as beta */
    SeriesTuple transversal;        /* nu_m - (target graph at (mu, a_0, b_0)) */
};
ReflectionSystem build_reflection_system(const GenericSubmanifoldNF& m,
                                         const GenericSubmanifoldNF& mp, const FormalMapNF& h,
                                         int r);

/* Actual jet series, one per packaged slot, in the full source space; rows
 * composed with this tuple reduce to zero modulo the source ideal. */
SeriesTuple reflection_substitution(const ReflectionSystem& sys, const GenericSubmanifoldNF& m,
                                    const FormalMapNF& h);

/* ---- monic reflection identities ---- */

/* Monic polynomial identities satisfied by the map components modulo the
 * source ideal, in two packagings:
 *   - components[j]: monic in the j-th map component, coefficients series in
 *     the (a, b) block of the packaged system (jet variables of order <= r);
 *   - dform[j]: the same identities with the packaged jets rewritten through
 *     plain (chi, tau)-derivatives: coefficients are series in the full
 *     source space extended by one slot per (delta, component) holding the
 *     delta-jet of the conjugated components minus its value at 0.
 * Component indices j < np are holomorphic components, j >= np transversal. */
struct ReflectionIdentity {
    int r = 0;
    int n = 0, d = 0, np = 0, dp = 0;
    ReflectionSystem system;             /* provenance: rows and jet bookkeeping */
    std::vector<MonicComponent> components;
    std::vector<MultiIndex> deltas;      /* over n+d slots, |delta| <= r, graded-lex */
    std::vector<std::vector<ComplexRational>> jet_delta; /* [di][q]: delta-jet at 0 */
    std::vector<PolyInX> dform;

    int dcount() const { return static_cast<int>(deltas.size()); }
    int ext_vars() const { return 2 * (n + d) + dcount() * (np + dp); }
    int abar_slot(int di, int q) const { return 2 * (n + d) + di * (np + dp) + q; }
};
ReflectionIdentity reflection_identities(const GenericSubmanifoldNF& m,
                                         const GenericSubmanifoldNF& mp, const FormalMapNF& h,
                                         int r_bound = -1);

/* Substitute a map's actual jets into every identity and reduce modulo the
 * source ideal; true iff all residuals vanish through the common validity
 * order (reported via `through` when given). */
bool verify_reflection(const GenericSubmanifoldNF& m, const ReflectionIdentity& identity,
                       const FormalMapNF& h, int* through = nullptr);

/* The identities with the extension slots filled by the given map's actual
 * jets: one monic polynomial per component with coefficients in the full
 * source space. */
std::vector<PolyInX> poly_in_coordinates(const GenericSubmanifoldNF& m,
                                         const ReflectionIdentity& identity, const FormalMapNF& h);

/* ---- Leibniz coefficient assembly ---- */

/* For P(X, x) = sum_k a_k(x) X^k and commuting derivations S acting on the
 * x-space, the iterated derivative S^gamma P(h(x), x) regroups as
 *   A(gamma,alpha,0) + sum_j sum_{nu^1..nu^j >= alpha} A(gamma,alpha,j,nu...)
 *                      (S^{nu^1}h) ... (S^{nu^j}h),
 * the nu-sum running over ordered tuples dominating alpha componentwise.
 * `a0` is A(gamma,alpha,0); `aj` lists A(gamma,alpha,j,nu^1..nu^j) keyed by
 * the sorted tuple (the value is symmetric in the nu's). */
struct LeibnizData {
    MultiIndex gamma, alpha;
    TruncatedSeries a0;
    std::vector<std::pair<std::vector<MultiIndex>, TruncatedSeries>> aj;

    const TruncatedSeries* find(const std::vector<MultiIndex>& nus) const;
};
LeibnizData leibniz_coefficients(const PolyInX& p, const TruncatedSeries& h,
                                 const std::vector<FormalVectorField>& s, const MultiIndex& alpha,
                                 const MultiIndex& gamma);

/* ---- derived polynomials ---- */

/* Given P with P(h(x), x) in an ideal annihilated by the substitution v and
 * preserved by the fields S, produce a nontrivial polynomial R_alpha with
 *   R_alpha((S^alpha h)(v(y)), v(y)) == 0 through order:
 * the degree-1 fast path when A(alpha,alpha,1,alpha) survives composition
 * with v, otherwise the first gamma0 in the graded-lex box [alpha, J*alpha]
 * with some surviving A(gamma0,alpha,j,alpha..alpha).  nullopt reports an
 * exhausted enumeration (a truncation artifact, not a disproof). */
struct DerivedPolynomial {
    MultiIndex alpha, gamma0;
    PolyInX r_alpha;       /* coefficients in the x-space */
    int branch_degree = 0; /* j with the surviving composed coefficient */
    int verified_through = 0;
    std::vector<TruncatedSeries> a_used; /* A(gamma0,alpha,j,alpha..alpha), j=0..J */
};
std::optional<DerivedPolynomial> derived_polynomial(
    const PolyInX& p, const TruncatedSeries& h, const std::vector<FormalVectorField>& s,
    const SeriesTuple& v, const MultiIndex& alpha,
    const std::function<TruncatedSeries(const TruncatedSeries&)>* reduce = nullptr);

/* ---- separation orders ---- */

/* m such that any two roots of P through the validity order agreeing to
 * order m coincide through (validity - m): twice the vanishing order of the
 * discriminant of the squarefree part, plus one.  Undetermined when that
 * discriminant vanishes through the validity order or the squarefree
 * reduction is obstructed. */
struct SeparationReport {
    bool determined = false;
    int m = -1;
    int disc_order = -1;
    std::string detail;
};
SeparationReport separation_order(const PolyInX& p);

/* ---- agreement ladder for pairs of maps ---- */

struct LadderRung {
    int k = -1;
    MultiIndex alpha; /* over the N holomorphic slots */
    int component = -1;
    bool agreed = false;
    bool identity_verified = false; /* both candidates satisfy the shared monic identity */
    int separation = -1;            /* separation order of that identity when determined */
    int poly_degree = -1;
    int verified_through = -1;
};

struct DeterminationReport {
    enum class Status { Disagreement, Agreement, Determined };
    Status status = Status::Agreement;
    int K = 0;
    int k_max = 0, alpha_max = 0;
    bool jets_agree = false; /* order-K jets of the two maps coincide */
    std::vector<LadderRung> rungs;
    std::optional<LadderRung> first_disagreement;
    int k1 = -1; /* full-rank Segre stage backing a Determined verdict */
    std::string detail;

    bool agreed_everywhere() const { return !first_disagreement.has_value(); }
};

/* Rung-by-rung comparison of (d^alpha H1) o v^k and (d^alpha H2) o v^k:
 * stage k = 0 compares jets at 0 through order K (the shared-jet
 * precondition), stages 1..k_max compare |alpha| <= alpha_max.  Where the
 * monic-identity machinery applies (both maps sharing r-jets), each rung also
 * records that both candidates satisfy the same identity and its separation
 * order.  Determined additionally requires a full-rank Segre stage k1 <=
 * k_max and direct equality of the maps through the common validity. */
DeterminationReport chain_agreement(const GenericSubmanifoldNF& m, const GenericSubmanifoldNF& mp,
                                    const FormalMapNF& h1, const FormalMapNF& h2, int K,
                                    int k_max = -1, int alpha_max = -1);

/* ---- convergence ledger ---- */

struct LedgerEntry {
    int k = -1;
    MultiIndex alpha; /* over the N holomorphic slots */
    int component = -1;
    int poly_degree = -1;
    int verified_through = -1;
    bool verified = false;
    PolyInX poly; /* the identity used, coefficients in the chain space */
};

struct ConvergenceLedger {
    int k_max = 0, alpha_max = 0;
    int r = 0;
    std::vector<LedgerEntry> entries;
    std::string final_step_note; /* the analytic inversion stage, out of scope */

    bool all_verified() const {
        for (const auto& e : entries)
            if (!e.verified) return false;
        return !entries.empty();
    }
};

/* For each stage k <= k_max and |alpha| <= alpha_max, record the verified
 * polynomial identity satisfied by (d^alpha H_j) o v^{k+1} along the k-th
 * Segre chain: the monic identity itself for alpha = 0, a derived polynomial
 * for alpha > 0.  Preconditions: the map sends source into target, the
 * target is essentially finite, and the Segre homomorphism evidence is
 * injective. */
ConvergenceLedger convergence_ledger(const GenericSubmanifoldNF& m, const GenericSubmanifoldNF& mp,
                                     const FormalMapNF& h, int k_max = -1, int alpha_max = -1);

}  // namespace crforge
