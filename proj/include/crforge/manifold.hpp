#pragma once

#include "ideal.hpp"

namespace crforge {

/* Conventions for variable layouts.
 *
 * Q-space (normal-form graph data):   z[0,n)  chi[n,2n)  tau[2n,2n+d)
 * Full space (pairs of coordinates):  z[0,n)  w[n,n+d)  chi[n+d,2n+d)  tau[2n+d,2n+2d)
 * Defining space == full space read as Z[0,N), zeta[N,2N) with N = n+d.
 *
 * "bar" of a series is coefficient conjugation plus the positional exchange
 * z<->chi, w<->tau of its argument blocks. */

/* Generic formal submanifold in normal form: the ideal is generated by
 * w_j - Q_j(z, chi, tau) with Q_j(0,chi,tau) = Q_j(z,0,tau) = tau_j. */
struct GenericSubmanifoldNF {
    int n = 0; /* CR dimension */
    int d = 0; /* codimension */
    SeriesTuple Q; /* d series in Q-space */

    int N() const { return n + d; }
    int qdim() const { return 2 * n + d; }
    int fdim() const { return 2 * (n + d); }
    int prec() const { return tuple_prec(Q); }

    /* full-space slots */
    int z_slot(int i) const { return i; }
    int w_slot(int l) const { return n + l; }
    int chi_slot(int i) const { return n + d + i; }
    int tau_slot(int l) const { return 2 * n + d + l; }
};

/* validating constructor: dimensions, normality of both slices, and reality
 * of the generated ideal (the conjugate generator family reduces to zero) */
GenericSubmanifoldNF make_manifold(int n, int d, SeriesTuple Q);

/* the d series Q-bar_j(chi, z, w) as full-space series */
SeriesTuple q_bar_full(const GenericSubmanifoldNF& m);
/* Q_j(z, chi, tau) embedded into the full space */
SeriesTuple q_full(const GenericSubmanifoldNF& m);

/* generators of the manifold ideal in the full space:
 * holo family w_j - Q_j(z,chi,tau); conjugate family tau_j - Qbar_j(chi,z,w) */
SeriesTuple ideal_generators(const GenericSubmanifoldNF& m, bool conjugate_family);

/* canonical membership normal form: substitute w := Q(z,chi,tau); the result
 * lives in Q-space and vanishes through the valid order iff f is in the
 * manifold ideal through that order */
TruncatedSeries reduce_mod_m(const GenericSubmanifoldNF& m, const TruncatedSeries& f_full);

/* ---- vector fields ---- */

struct FormalVectorField {
    SeriesTuple coeff; /* one coefficient series per full-space slot */
};

/* sum_i coeff_i * df/dx_i; validity drops by one */
TruncatedSeries apply_field(const FormalVectorField& x, const TruncatedSeries& f);
FormalVectorField field_bracket(const FormalVectorField& x, const FormalVectorField& y);
/* support restricted to the chi/tau slots (type (0,1)) or z/w slots (1,0) */
bool is_type_01(const FormalVectorField& x, int n, int d);
bool is_type_10(const FormalVectorField& x, int n, int d);

/* basis of CR vector fields L_j = d/dchi_j + sum_l dQbar_l/dchi_j d/dtau_l;
 * these commute pairwise exactly and annihilate the ideal generators */
std::vector<FormalVectorField> cr_basis(const GenericSubmanifoldNF& m);

/* ---- general (defining-function) coordinates ---- */

struct DefiningData {
    int N = 0; /* ambient dimension */
    int d = 0; /* codimension */
    SeriesTuple rho; /* d series in (Z, zeta): Z[0,N), zeta[N,2N) */
    int prec() const { return tuple_prec(rho); }
};

/* validating constructor: vanishing at 0, coefficient reality
 * rho(Z,zeta) == bar(rho)(zeta,Z), and genericity (independent Z-differentials) */
DefiningData make_defining(int N, int d, SeriesTuple rho);

/* frame S_j = d/dZ_j - rho_{Z_j} (rho_{zeta''})^{-1} d/dzeta'' tangent to the
 * ideal exactly; acts as the plain d/dZ_j on zeta-independent series */
std::vector<FormalVectorField> tangential_frame(const DefiningData& def);

/* Normalization: permute Z so the last d columns of the differential are
 * independent, solve rho = 0 for that block, flatten the center slice, and
 * recoordinate so both normality slices become exact.  Normality and reality
 * of the result are verified, not assumed. */
struct Normalization {
    GenericSubmanifoldNF m;
    std::vector<int> perm;   /* old Z-slot i ends up at new slot perm[i] */
    SeriesTuple new_coords;  /* N series in the old Z expressing the new Z */
};
Normalization normalize(const DefiningData& def);

/* ---- Segre machinery ---- */

/* k-th Segre mapping: N components in k*n variables (blocks z, x^1, ..,
 * x^{k-1}); v^0 = 0, v^1(z) = (z, 0), v^{k+1}(z, xi) = (z, Q(z, vbar^k(xi))) */
SeriesTuple segre_map(const GenericSubmanifoldNF& m, int k);

/* every ideal generator vanishes under (Z,zeta) := (v^{k+1}(z,xi), vbar^k(xi)) */
bool verify_segre_identity(const GenericSubmanifoldNF& m, int k);

struct TypeReport {
    enum class Status { Yes, NoUpTo, Inconclusive };
    Status status = Status::Inconclusive;
    int k1 = -1;            /* Yes: first k with full Segre rank */
    int no_up_to = -1;      /* NoUpTo: deficiency certified for all k <= this */
    int full_rank = 0;      /* the target rank N */
    std::vector<int> ranks; /* certified lower bounds per k, nondecreasing */
    bool symbolic = false;  /* deficiency certified by vanishing minors */
    /* a rational point with v^{2 k1} = 0 and full Jacobian rank, when found */
    std::optional<std::vector<ComplexRational>> rank_point;

    bool finite_type() const { return status == Status::Yes; }
};

/* finite type via Segre ranks: yes(k1) at the first certified full rank;
 * no_up_to(d+1) when symbolic mode certifies deficiency at every k <= d+1
 * (sufficient by rank monotonicity and the k1 <= d+1 bound) */
TypeReport finite_type_test(const GenericSubmanifoldNF& m, int k_max = -1, uint64_t seed = 17);

/* normal-form essential generators: the chi-power coefficients of Qbar at
 * w = 0, i.e. series in z, for 1 <= |alpha| <= alpha_bound
 * (default 2*prec/3) */
SeriesTuple essential_generators(const GenericSubmanifoldNF& m, int alpha_bound = -1);

/* general-coordinates route: the CR-field coefficients frozen at Z = 0 give
 * fields X_j; returns X^alpha rho_l |_{zeta=0} as series in Z,
 * 0 <= |alpha| <= alpha_bound */
SeriesTuple essential_generators_general(const DefiningData& def, int alpha_bound = -1);

struct EssFinReport {
    StaircaseReport staircase;
    SeriesTuple generators;     /* the jet series the verdict was computed from */
    int alpha_bound = 0;
    int alpha_cut = -1;         /* smallest jet order at which the span closed */
    std::optional<CurveWitness> curve; /* disproof certificate when Undetermined */

    bool essentially_finite() const { return staircase.finite(); }
};

/* staircase over the essential generators, trying jet cutoffs in increasing
 * order so low-order generators keep their full validity; on Undetermined,
 * searches for a monomial curve annihilating the generator jets */
EssFinReport essential_finiteness_test(const GenericSubmanifoldNF& m, int alpha_bound = -1,
                                       int degree_bound = -1);

}  // namespace crforge
