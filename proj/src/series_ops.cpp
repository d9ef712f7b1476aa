#include "crforge/series_ops.hpp"

#include <algorithm>

namespace crforge {

/* split f into components of exact total degree m in the variables != var */
static std::vector<TruncatedSeries> split_by_codegree(const TruncatedSeries& f, int var, int max_m,
                                                      int internal_prec) {
    std::vector<TruncatedSeries> comp(max_m + 1, TruncatedSeries::zero(f.nvars, internal_prec));
    for (const auto& [m, c] : f.terms) {
        int u_deg = m.degree() - m[var];
        if (u_deg > max_m) continue;
        comp[u_deg].add_term(m, c);
    }
    return comp;
}

WeierstrassData weierstrassPrepareImpl(const TruncatedSeries& f, int var) {
    const int D = f.prec;
    TruncatedSeries f00 = f;
    for (int i = 0; i < f.nvars; ++i)
        if (i != var) f00 = set_var_zero(f00, i);
    if (f00.is_zero())
        throw series_error("weierstrass_prepare: distinguished order not finite through validity");
    const int N = f00.ord();

    /* internal headroom in the distinguished variable: each codegree step can
     * consume N orders of it */
    const int cap = D + N * (D + 1);
    const int nv = f.nvars;

    /* e(x_var) with f(0,..,x_var,..,0) = x_var^N * e */
    TruncatedSeries e(nv, cap);
    for (const auto& [m, c] : f00.terms) {
        MultiIndex mm = m;
        mm[var] -= N;
        e.add_term(mm, c);
    }
    TruncatedSeries einv = invert_unit(e);

    auto fcomp = split_by_codegree(f, var, D, cap);
    std::vector<TruncatedSeries> U(D + 1, TruncatedSeries::zero(nv, cap));
    std::vector<TruncatedSeries> W(D + 1, TruncatedSeries::zero(nv, cap));
    U[0] = e;
    {
        MultiIndex xN(nv);
        xN[var] = N;
        W[0].add_term(xN, rat(1));
    }

    for (int m = 1; m <= D; ++m) {
        TruncatedSeries g = fcomp[m];
        for (int i = 1; i < m; ++i) g = sub(g, mul(U[i], W[m - i]));
        TruncatedSeries h = mul(g, einv);
        /* W[m]: part with var-degree < N;  U[m]: (rest / x_var^N) * e */
        TruncatedSeries wlow(nv, cap), hhi(nv, cap);
        for (const auto& [mi, c] : h.terms) {
            if (mi[var] < N) {
                wlow.add_term(mi, c);
            } else {
                MultiIndex mm = mi;
                mm[var] -= N;
                hhi.add_term(mm, c);
            }
        }
        W[m] = std::move(wlow);
        U[m] = mul(hhi, e);
    }

    TruncatedSeries unit(nv, cap), monic_series(nv, cap);
    for (int m = 0; m <= D; ++m) {
        unit = add(unit, U[m]);
        monic_series = add(monic_series, W[m]);
    }

    WeierstrassData out;
    out.var = var;
    out.order = N;
    out.unit = truncate_to(unit, D);
    /* monic coefficients: keep through total degree D in the other variables */
    PolyInX p = poly_from_series(truncate_to(monic_series, std::min(cap, D + N)), var);
    /* drop coefficients above X^N (none should exist) and re-truncate */
    p.coeffs.resize(N + 1, TruncatedSeries::zero(nv, D));
    for (auto& c : p.coeffs) c = truncate_to(c, D);
    out.monic = p;

    /* contract: f == unit * monic through D */
    TruncatedSeries recon = mul(out.unit, series_from_poly(out.monic, var));
    if (!equal_through(recon, truncate_to(f, D), D))
        throw series_error("weierstrass_prepare: reconstruction defect");
    if (!out.monic.is_monic()) throw series_error("weierstrass_prepare: output not monic");
    for (int l = 0; l < N; ++l)
        if (!out.monic.coeffs[l].constant_term().is_zero())
            throw series_error("weierstrass_prepare: lower coefficient has constant term");
    return out;
}

WeierstrassData weierstrass_prepare(const TruncatedSeries& f, int var) {
    return weierstrassPrepareImpl(f, var);
}

SeriesTuple implicit_solve(const SeriesTuple& system, int x_count) {
    const int d = static_cast<int>(system.size());
    if (d == 0) throw series_error("implicit_solve: empty system");
    const int nv = system[0].nvars;
    const int y_count = nv - x_count;
    if (y_count != d) throw series_error("implicit_solve: need as many equations as unknowns");
    const int prec = tuple_prec(system);
    for (const auto& s : system)
        if (!s.constant_term().is_zero()) throw series_error("implicit_solve: system(0) != 0");

    QMat a(d, QVec(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a[i][j] = system[i].coeff(MultiIndex::unit(nv, x_count + j));
    /* invert the constant Jacobian */
    QMat ainv(d, QVec(d));
    {
        QMat work = a;
        for (int i = 0; i < d; ++i) ainv[i][i] = rat(1);
        for (int c = 0; c < d; ++c) {
            int sel = -1;
            for (int i = c; i < d; ++i)
                if (!work[i][c].is_zero()) {
                    sel = i;
                    break;
                }
            if (sel < 0) throw series_error("implicit_solve: Jacobian in the solved block not invertible");
            std::swap(work[sel], work[c]);
            std::swap(ainv[sel], ainv[c]);
            ComplexRational inv = work[c][c].inv();
            for (int j = 0; j < d; ++j) {
                work[c][j] *= inv;
                ainv[c][j] *= inv;
            }
            for (int i = 0; i < d; ++i) {
                if (i == c || work[i][c].is_zero()) continue;
                ComplexRational f = work[i][c];
                for (int j = 0; j < d; ++j) {
                    work[i][j] -= f * work[c][j];
                    ainv[i][j] -= f * ainv[c][j];
                }
            }
        }
    }

    SeriesTuple y = tuple_zero(d, x_count, prec);
    SeriesTuple x_ident = identity_tuple(x_count, prec);
    for (int step = 0; step <= prec + 1; ++step) {
        SeriesTuple subs = x_ident;
        for (const auto& yi : y) subs.push_back(yi);
        SeriesTuple residual = compose_tuple(system, subs);
        if (tuple_zero_through(residual, prec)) break;
        for (int i = 0; i < d; ++i) {
            TruncatedSeries delta(x_count, prec);
            for (int j = 0; j < d; ++j) delta = add(delta, scale(residual[j], ainv[i][j]));
            y[i] = sub(y[i], delta);
        }
    }
    {
        SeriesTuple subs = x_ident;
        for (const auto& yi : y) subs.push_back(yi);
        SeriesTuple residual = compose_tuple(system, subs);
        if (!tuple_zero_through(residual, prec))
            throw series_error("implicit_solve: Newton iteration did not reach the validity order");
    }
    return y;
}

std::vector<std::vector<TruncatedSeries>> jacobian(const SeriesTuple& map) {
    std::vector<std::vector<TruncatedSeries>> j;
    for (const auto& f : map) {
        std::vector<TruncatedSeries> row;
        for (int v = 0; v < f.nvars; ++v) row.push_back(derive(f, v));
        j.push_back(std::move(row));
    }
    return j;
}

RankResult matrix_rank_with_minor(const QMat& m) {
    RankResult out;
    const int rows = static_cast<int>(m.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
    /* elimination tracking original row/col indices */
    QMat work = m;
    std::vector<int> row_ids(rows), used_rows, used_cols;
    for (int i = 0; i < rows; ++i) row_ids[i] = i;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int sel = -1;
        for (int i = r; i < rows; ++i)
            if (!work[i][c].is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(work[sel], work[r]);
        std::swap(row_ids[sel], row_ids[r]);
        used_rows.push_back(row_ids[r]);
        used_cols.push_back(c);
        ComplexRational inv = work[r][c].inv();
        for (int j = 0; j < cols; ++j) work[r][j] *= inv;
        for (int i = r + 1; i < rows; ++i) {
            if (work[i][c].is_zero()) continue;
            ComplexRational f = work[i][c];
            for (int j = 0; j < cols; ++j) work[i][j] -= f * work[r][j];
        }
        ++r;
    }
    out.rank = r;
    if (r > 0) {
        std::sort(used_rows.begin(), used_rows.end());
        QMat sub(r, QVec(r));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) sub[i][j] = m[used_rows[i]][used_cols[j]];
        RankCertificate cert;
        cert.rows = used_rows;
        cert.cols = used_cols;
        cert.minor_value = det_exact(sub);
        out.certificate = cert;
    }
    return out;
}

static void subsets_of_size(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= n - (k - static_cast<int>(cur.size())); ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

RankResult generic_rank(const SeriesTuple& map, bool symbolic, uint64_t seed, int retries,
                        const std::vector<std::vector<ComplexRational>>* hints) {
    if (map.empty()) return {};
    const int nv = map[0].nvars;
    const int m = static_cast<int>(map.size());
    auto jac = jacobian(map);

    RankResult best;
    RationalSampler sampler(seed);
    std::vector<std::vector<ComplexRational>> points;
    if (hints)
        for (const auto& h : *hints) points.push_back(h);
    for (int t = 0; t < retries; ++t) points.push_back(sampler.point(nv));
    for (const auto& pt : points) {
        QMat jm(m, QVec(nv));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < nv; ++j) jm[i][j] = eval_at_point(jac[i][j], pt);
        RankResult rr = matrix_rank_with_minor(jm);
        if (rr.rank > best.rank || !best.certificate) {
            best = rr;
            if (best.certificate) best.certificate->point = pt;
        }
        if (best.rank == std::min(m, nv)) break;
    }

    if (!symbolic) return best;

    /* upgrade: find the largest r with a nonvanishing r-minor through the
     * validity order, starting from the sampled lower bound */
    int prec = INT32_MAX;
    for (const auto& row : jac)
        for (const auto& e : row) prec = std::min(prec, e.prec);
    int r = best.rank;
    while (r < std::min(m, nv)) {
        std::vector<std::vector<int>> rsets, csets;
        subsets_of_size(m, r + 1, rsets);
        subsets_of_size(nv, r + 1, csets);
        bool all_vanish = true;
        int checked = 0;
        for (const auto& rs : rsets) {
            for (const auto& cs : csets) {
                std::vector<std::vector<TruncatedSeries>> sub;
                for (int i : rs) {
                    std::vector<TruncatedSeries> row;
                    for (int j : cs) row.push_back(jac[i][j]);
                    sub.push_back(std::move(row));
                }
                TruncatedSeries d = series_det(sub);
                ++checked;
                if (!is_zero_through(d, d.prec)) {
                    all_vanish = false;
                    break;
                }
            }
            if (!all_vanish) break;
        }
        best.minors_checked = checked;
        if (all_vanish) {
            best.symbolic = true;
            break;
        }
        ++r; /* some (r+1)-minor is nonzero as a series: generic rank exceeds r */
        best.rank = r;
    }
    if (best.rank == std::min(m, nv)) best.symbolic = true;
    (void)prec;
    return best;
}

}  // namespace crforge
