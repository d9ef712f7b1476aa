#include "crforge/poly_in_x.hpp"

namespace crforge {

PolyInX poly_from_series(const TruncatedSeries& f, int var) {
    int dmax = 0;
    for (const auto& [m, c] : f.terms) dmax = std::max(dmax, m[var]);
    PolyInX p(f.nvars, dmax, f.prec);
    for (const auto& [m, c] : f.terms) {
        MultiIndex mm = m;
        int k = mm[var];
        mm[var] = 0;
        p.coeffs[k].add_term(mm, c);
    }
    return p;
}

TruncatedSeries series_from_poly(const PolyInX& p, int var) {
    TruncatedSeries out(p.nvars, p.prec());
    for (int k = 0; k < static_cast<int>(p.coeffs.size()); ++k) {
        for (const auto& [m, c] : p.coeffs[k].terms) {
            MultiIndex mm = m;
            mm[var] += k;
            out.add_term(mm, c);
        }
    }
    return out;
}

TruncatedSeries poly_eval_series(const PolyInX& p, const TruncatedSeries& g) {
    TruncatedSeries acc = TruncatedSeries::zero(p.nvars, std::min(p.prec(), g.prec));
    for (int k = p.degree(); k >= 0; --k) {
        acc = mul(acc, g);
        acc = add(acc, p.coeffs[k]);
    }
    return acc;
}

static void pad_to(PolyInX& p, int deg, int prec) {
    while (static_cast<int>(p.coeffs.size()) <= deg) p.coeffs.push_back(TruncatedSeries::zero(p.nvars, prec));
}

PolyInX poly_add(const PolyInX& a, const PolyInX& b) {
    PolyInX r = a;
    pad_to(r, std::max(a.degree(), b.degree()), std::min(a.prec(), b.prec()));
    for (int k = 0; k <= b.degree(); ++k) r.coeffs[k] = add(r.coeffs[k], b.coeffs[k]);
    r.normalize();
    return r;
}

PolyInX poly_sub(const PolyInX& a, const PolyInX& b) {
    PolyInX r = a;
    pad_to(r, std::max(a.degree(), b.degree()), std::min(a.prec(), b.prec()));
    for (int k = 0; k <= b.degree(); ++k) r.coeffs[k] = sub(r.coeffs[k], b.coeffs[k]);
    r.normalize();
    return r;
}

PolyInX poly_mul(const PolyInX& a, const PolyInX& b) {
    int da = a.degree(), db = b.degree();
    if (da < 0 || db < 0) return PolyInX(a.nvars, 0, std::min(a.prec(), b.prec()));
    PolyInX r(a.nvars, da + db, std::min(a.prec(), b.prec()));
    for (int i = 0; i <= da; ++i)
        for (int j = 0; j <= db; ++j) r.coeffs[i + j] = add(r.coeffs[i + j], mul(a.coeffs[i], b.coeffs[j]));
    return r;
}

PolyInX poly_scale(const PolyInX& a, const TruncatedSeries& s) {
    PolyInX r = a;
    for (auto& c : r.coeffs) c = mul(c, s);
    r.normalize();
    return r;
}

PolyInX poly_rem_monic(const PolyInX& a, const PolyInX& b) {
    int db = b.degree();
    if (db < 0) throw series_error("poly_rem_monic: zero divisor");
    if (!b.is_monic()) throw series_error("poly_rem_monic: divisor not monic");
    PolyInX r = a;
    r.normalize();
    while (r.degree() >= db) {
        int dr = r.degree();
        TruncatedSeries lead = r.coeffs[dr];
        /* r -= lead * X^(dr-db) * b */
        for (int k = 0; k <= db; ++k)
            r.coeffs[dr - db + k] = sub(r.coeffs[dr - db + k], mul(lead, b.coeffs[k]));
        r.normalize();
        if (r.degree() == dr && !r.coeffs[dr].is_zero())
            throw series_error("poly_rem_monic: cancellation failed");
    }
    return r;
}

PolyInX poly_derivative(const PolyInX& a) {
    int d = a.degree();
    if (d <= 0) return PolyInX(a.nvars, 0, a.prec());
    PolyInX r(a.nvars, d - 1, a.prec());
    for (int k = 1; k <= d; ++k) r.coeffs[k - 1] = scale(a.coeffs[k], rat(k));
    return r;
}

TruncatedSeries series_det(const std::vector<std::vector<TruncatedSeries>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) throw series_error("series_det: empty matrix");
    int nv = m[0][0].nvars;
    int prec = INT32_MAX;
    for (const auto& row : m)
        for (const auto& e : row) prec = std::min(prec, e.prec);
    if (n > 16) throw series_error("series_det: matrix too large");
    /* dp over column subsets: minor of first popcount(S) rows on columns S */
    std::vector<TruncatedSeries> dp(1u << n, TruncatedSeries::zero(nv, prec));
    dp[0] = TruncatedSeries::constant(nv, prec, rat(1));
    for (unsigned s = 1; s < (1u << n); ++s) {
        int row = __builtin_popcount(s) - 1;
        TruncatedSeries acc = TruncatedSeries::zero(nv, prec);
        int pos = 0; /* position of c within s, for the cofactor sign */
        for (int c = 0; c < n; ++c) {
            if (!(s & (1u << c))) continue;
            if (!m[row][c].is_zero() && !dp[s & ~(1u << c)].is_zero()) {
                TruncatedSeries t = mul(m[row][c], dp[s & ~(1u << c)]);
                acc = ((row + pos) % 2 == 0) ? add(acc, t) : sub(acc, t);
            }
            ++pos;
        }
        dp[s] = std::move(acc);
    }
    return dp[(1u << n) - 1];
}

TruncatedSeries resultant_in_x(const PolyInX& p1, const PolyInX& p2) {
    int n = p1.degree(), m = p2.degree();
    if (n < 0 || m < 0) throw series_error("resultant_in_x: zero polynomial");
    int nv = p1.nvars;
    int prec = std::min(p1.prec(), p2.prec());
    if (m == 0) {
        /* Res(p1, c) = c^deg(p1) */
        return pow_series(truncate_to(p2.coeffs[0], prec), n);
    }
    /* Sylvester matrix: m rows of p1's coefficients, n rows of p2's */
    int size = n + m;
    std::vector<std::vector<TruncatedSeries>> syl(
        size, std::vector<TruncatedSeries>(size, TruncatedSeries::zero(nv, prec)));
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) syl[r][r + (n - k)] = truncate_to(p1.coeffs[k], prec);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) syl[m + r][r + (m - k)] = truncate_to(p2.coeffs[k], prec);
    return series_det(syl);
}

std::optional<int> discriminant_order(const PolyInX& p) {
    int d = p.degree();
    if (d < 0) return std::nullopt;
    if (d == 0) return std::nullopt;
    PolyInX dp = poly_derivative(p);
    if (d == 1) return 0; /* disc of a linear polynomial is 1 */
    TruncatedSeries res = resultant_in_x(p, dp);
    int common = res.prec;
    if (is_zero_through(res, common)) return std::nullopt;
    int lc_ord = p.coeffs[d].ord();
    return res.ord() - lc_ord;
}

}  // namespace crforge
