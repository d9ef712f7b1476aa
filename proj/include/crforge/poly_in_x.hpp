#pragma once

#include "series.hpp"

namespace crforge {

/* Polynomial in one distinguished indeterminate X whose coefficients are
 * truncated series in an ambient variable space.  X is external: it is not
 * one of the series variables.  coeffs[k] multiplies X^k. */
struct PolyInX {
    int nvars = 0;
    std::vector<TruncatedSeries> coeffs; /* may end with zero entries until normalized */

    PolyInX() = default;
    PolyInX(int nv, int deg_hint, int prec) : nvars(nv) {
        coeffs.assign(deg_hint + 1, TruncatedSeries::zero(nv, prec));
    }

    int degree() const {
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
            if (!coeffs[k].is_zero()) return k;
        return -1; /* zero polynomial */
    }
    void normalize() {
        while (coeffs.size() > 1 && coeffs.back().is_zero()) coeffs.pop_back();
    }
    const TruncatedSeries& coeff(int k) const { return coeffs[k]; }
    int prec() const {
        int p = INT32_MAX;
        for (const auto& c : coeffs) p = std::min(p, c.prec);
        return coeffs.empty() ? 0 : p;
    }
    bool is_monic() const {
        int d = degree();
        if (d < 0) return false;
        TruncatedSeries one = TruncatedSeries::constant(nvars, coeffs[d].prec, rat(1));
        return equal_on_common(coeffs[d], one);
    }
};

/* view a series as a polynomial in its variable `var`; coefficient series
 * live in the same ambient space with slot `var` unused */
PolyInX poly_from_series(const TruncatedSeries& f, int var);
/* reassemble, substituting X := x_var */
TruncatedSeries series_from_poly(const PolyInX& p, int var);
/* substitute X := g (series in the ambient space) */
TruncatedSeries poly_eval_series(const PolyInX& p, const TruncatedSeries& g);

PolyInX poly_add(const PolyInX& a, const PolyInX& b);
PolyInX poly_sub(const PolyInX& a, const PolyInX& b);
PolyInX poly_mul(const PolyInX& a, const PolyInX& b);
PolyInX poly_scale(const PolyInX& a, const TruncatedSeries& s);
/* remainder of a modulo monic b (exact division steps) */
PolyInX poly_rem_monic(const PolyInX& a, const PolyInX& b);
/* d/dX */
PolyInX poly_derivative(const PolyInX& a);

/* determinant of a square matrix of series (expansion with subset memoization;
 * intended for small sizes) */
TruncatedSeries series_det(const std::vector<std::vector<TruncatedSeries>>& m);

/* Resultant in X via the Sylvester determinant over the series ring.
 * p1 must have unit (invertible) leading coefficient. */
TruncatedSeries resultant_in_x(const PolyInX& p1, const PolyInX& p2);

/* discriminant vanishing order: ord(Res(p, p')) - ord(lc(p)), through the
 * common validity order; nullopt when Res(p,p') is 0 through that order */
std::optional<int> discriminant_order(const PolyInX& p);

}  // namespace crforge
