#pragma once

#include <cstdint>
#include <random>

#include "linalg.hpp"
#include "poly_in_x.hpp"
#include "series.hpp"

namespace crforge {

/* ---- Weierstrass preparation ---- */

struct WeierstrassData {
    int var = -1;       /* distinguished variable slot */
    int order = 0;      /* N = distinguished vanishing order */
    TruncatedSeries unit;
    PolyInX monic;      /* X^N + sum_{l<N} c_l * X^l, c_l independent of var, c_l(0)=0 */
};

/* f = unit * monic(x_var) through f.prec; requires f(0,..,x_var,..,0) to have
 * finite vanishing order N <= f.prec.  Computed order by order in the degree
 * of the remaining variables, with enough internal headroom in the
 * distinguished variable that the reconstruction is exact through f.prec. */
WeierstrassData weierstrass_prepare(const TruncatedSeries& f, int var);

/* ---- implicit function solve ---- */

/* system: d series in (x, y) with x = slots [0, x_count), y = the remaining d
 * slots.  Solves system(x, y(x)) == 0 through the common validity order by
 * Newton steps against the constant Jacobian; requires system(0) = 0 and
 * d system/d y (0) invertible. */
SeriesTuple implicit_solve(const SeriesTuple& system, int x_count);

/* ---- generic rank ---- */

struct RationalSampler {
    std::mt19937_64 rng;
    explicit RationalSampler(uint64_t seed) : rng(seed) {}
    mpq_class next_rational() {
        std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
        mpq_class q(num(rng), den(rng));
        q.canonicalize();
        return q;
    }
    ComplexRational next() {
        mpq_class re = next_rational();
        std::uniform_int_distribution<int> pick(0, 2);
        mpq_class im = pick(rng) == 0 ? mpq_class(0) : next_rational();
        return ComplexRational(re, im);
    }
    std::vector<ComplexRational> point(int dim) {
        std::vector<ComplexRational> p;
        for (int i = 0; i < dim; ++i) p.push_back(next());
        return p;
    }
};

struct RankCertificate {
    std::vector<ComplexRational> point; /* sample witness (empty for symbolic-only) */
    std::vector<int> rows, cols;        /* a nonsingular rank x rank minor */
    ComplexRational minor_value;
};

struct RankResult {
    int rank = 0;
    bool symbolic = false;     /* true: all (rank+1)-minors vanish through validity */
    int minors_checked = 0;    /* symbolic mode: number of (rank+1)-minors verified zero */
    std::optional<RankCertificate> certificate;
};

std::vector<std::vector<TruncatedSeries>> jacobian(const SeriesTuple& map);

/* Generic rank of the Jacobian of the truncated representative.
 * Sample mode: exact evaluation at seeded small-rational points (exact lower
 * bound, certified by a nonzero minor).  Symbolic mode additionally verifies
 * that every (r+1)-minor vanishes identically through the validity order,
 * upgrading the bound to the generic rank of the truncated map. */
RankResult generic_rank(const SeriesTuple& map, bool symbolic, uint64_t seed, int retries = 8,
                        const std::vector<std::vector<ComplexRational>>* hints = nullptr);

/* exact rank of a rational matrix recording a witness minor */
RankResult matrix_rank_with_minor(const QMat& m);

}  // namespace crforge
