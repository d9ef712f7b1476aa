#include "crforge/mapping.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace crforge {

namespace {

void require_cond(bool ok, const char* what) {
    if (!ok) throw series_error(what);
}

/* F, G components live in (z, w); these place them into the full source
 * space (z, w, chi, tau), plainly or as conjugates on the barred block. */
SeriesTuple to_full_plain(const SeriesTuple& t, const GenericSubmanifoldNF& m) {
    std::vector<int> where(m.N());
    for (int i = 0; i < m.N(); ++i) where[i] = i;
    return remap_tuple(t, m.fdim(), where);
}

SeriesTuple to_full_bar(const SeriesTuple& t, const GenericSubmanifoldNF& m) {
    std::vector<int> where(m.N());
    for (int i = 0; i < m.N(); ++i) where[i] = m.N() + i;
    SeriesTuple out;
    for (const TruncatedSeries& f : t) out.push_back(remap_vars(bar_conjugate(f), m.fdim(), where));
    return out;
}

/* substitution tuple (z' := zp, chi' := cp, tau' := tp) for the target
 * graph series, which live in (z', chi', tau') with 2n' + d' slots */
SeriesTuple target_subs(const GenericSubmanifoldNF& mp, const SeriesTuple& zp,
                        const SeriesTuple& cp, const SeriesTuple& tp) {
    SeriesTuple subs;
    for (int i = 0; i < mp.n; ++i) subs.push_back(zp[i]);
    for (int i = 0; i < mp.n; ++i) subs.push_back(cp[i]);
    for (int l = 0; l < mp.d; ++l) subs.push_back(tp[l]);
    return subs;
}

ComplexRational multi_factorial(const MultiIndex& beta) {
    ComplexRational f = rat(1);
    for (int i = 0; i < beta.size(); ++i)
        for (int k = 2; k <= beta[i]; ++k) f *= rat(k);
    return f;
}

/* scale a field so its first nonzero coefficient term (slot-major, then
 * graded-lex) equals 1; keeps reported kernels canonical */
void normalize_field(FormalVectorField& x) {
    for (const TruncatedSeries& c : x.coeff) {
        if (c.is_zero()) continue;
        ComplexRational inv = c.terms.begin()->second.inv();
        for (TruncatedSeries& e : x.coeff) e = scale(e, inv);
        return;
    }
}

}  // namespace

FormalMapNF make_map(int n, int d, int np, int dp, SeriesTuple F, SeriesTuple G) {
    require_cond(n >= 1 && d >= 1 && np >= 1 && dp >= 1, "map: dimensions must be positive");
    require_cond(static_cast<int>(F.size()) == np && static_cast<int>(G.size()) == dp,
                 "map: component counts must match the target dimensions");
    FormalMapNF h;
    h.n = n;
    h.d = d;
    h.np = np;
    h.dp = dp;
    h.F = std::move(F);
    h.G = std::move(G);
    for (const SeriesTuple* t : {&h.F, &h.G})
        for (const TruncatedSeries& c : *t) {
            require_cond(c.nvars == n + d, "map: components must live in the source (z, w) space");
            require_cond(c.constant_term().is_zero(), "map: components must vanish at the origin");
        }
    return h;
}

FormalMapNF identity_map(int n, int d, int prec) {
    SeriesTuple id = identity_tuple(n + d, prec);
    SeriesTuple F(id.begin(), id.begin() + n);
    SeriesTuple G(id.begin() + n, id.end());
    return make_map(n, d, n, d, std::move(F), std::move(G));
}

FormalMapNF compose_map(const FormalMapNF& outer, const FormalMapNF& inner) {
    require_cond(inner.np == outer.n && inner.dp == outer.d,
                 "map composition: inner target dimensions must match outer source dimensions");
    SeriesTuple subs = inner.F;
    subs.insert(subs.end(), inner.G.begin(), inner.G.end());
    return make_map(inner.n, inner.d, outer.np, outer.dp, compose_tuple(outer.F, subs),
                    compose_tuple(outer.G, subs));
}

std::vector<ComplexRational> map_jet(const FormalMapNF& h, const MultiIndex& beta) {
    require_cond(beta.size() == h.svars(), "map jet: index must live in the source space");
    require_cond(beta.degree() <= h.prec(), "map jet: order exceeds the stored validity");
    ComplexRational fact = multi_factorial(beta);
    std::vector<ComplexRational> jet;
    for (const SeriesTuple* t : {&h.F, &h.G})
        for (const TruncatedSeries& c : *t) jet.push_back(c.coeff(beta) * fact);
    return jet;
}

SeriesTuple segre_restriction(const FormalMapNF& h) {
    std::vector<int> where(h.svars(), -1);
    for (int i = 0; i < h.n; ++i) where[i] = i;
    SeriesTuple out;
    for (const TruncatedSeries& f : h.F) {
        TruncatedSeries g = f;
        for (int l = 0; l < h.d; ++l) g = set_var_zero(g, h.n + l);
        out.push_back(remap_vars(g, h.n, where));
    }
    return out;
}

SeriesTuple map_graph_full(const FormalMapNF& h, bool conjugated) {
    int nd = h.svars();
    std::vector<int> where(nd);
    for (int i = 0; i < nd; ++i) where[i] = conjugated ? nd + i : i;
    SeriesTuple out;
    for (const SeriesTuple* part : {&h.F, &h.G})
        for (const TruncatedSeries& f : *part)
            out.push_back(remap_vars(conjugated ? bar_conjugate(f) : f, 2 * nd, where));
    return out;
}

MapCheckReport check_sends(const GenericSubmanifoldNF& m, const GenericSubmanifoldNF& mp,
                           const FormalMapNF& h) {
    require_cond(h.n == m.n && h.d == m.d, "sends check: source dimensions must match");
    require_cond(h.np == mp.n && h.dp == mp.d, "sends check: target dimensions must match");
    SeriesTuple Ff = to_full_plain(h.F, m);
    SeriesTuple Gf = to_full_plain(h.G, m);
    SeriesTuple Fb = to_full_bar(h.F, m);
    SeriesTuple Gb = to_full_bar(h.G, m);
    SeriesTuple subs = target_subs(mp, Fb, Ff, Gf);
    MapCheckReport rep;
    rep.sends = true;
    for (int l = 0; l < mp.d; ++l) {
        TruncatedSeries lhs = sub(Gb[l], compose(bar_conjugate(mp.Q[l]), subs));
        TruncatedSeries red = reduce_mod_m(m, lhs);
        if (!red.is_zero()) rep.sends = false;
        rep.residual.push_back(std::move(red));
    }
    rep.order = tuple_prec(rep.residual);
    return rep;
}

FiniteMapReport finite_map_test(const SeriesTuple& components, int degree_bound) {
    require_cond(!components.empty(), "finite map test: no components");
    for (const TruncatedSeries& c : components)
        require_cond(c.constant_term().is_zero(),
                     "finite map test: components must vanish at the origin");
    SeriesIdeal ideal{components};
    if (degree_bound < 0) degree_bound = ideal.prec();
    FiniteMapReport rep;
    rep.staircase = staircase_codim(ideal, degree_bound);
    if (!rep.staircase.finite()) rep.curve = find_monomial_curve(components);
    return rep;
}

SegreHomReport segre_injectivity_test(const GenericSubmanifoldNF& m,
                                      const GenericSubmanifoldNF& mp, const FormalMapNF& h,
                                      int relation_degree_bound) {
    require_cond(h.n == m.n && h.d == m.d && h.np == mp.n && h.dp == mp.d,
                 "injectivity test: dimensions must match the submanifolds");
    SegreHomReport rep;
    rep.relation_bound = relation_degree_bound;
    SeriesTuple f = segre_restriction(h);

    RankResult rr = generic_rank(f, /*symbolic=*/false, 17);
    if (rr.rank < h.np) rr = generic_rank(f, /*symbolic=*/true, 17);
    rep.rank = rr.rank;
    rep.rank_certificate = rr;
    if (rr.rank == h.np) {
        rep.status = SegreHomReport::Status::Injective;
        return rep;
    }

    FiniteMapReport fm = finite_map_test(f);
    rep.finiteness = fm.staircase;
    if (fm.finite()) {
        rep.status = SegreHomReport::Status::Injective;
        return rep;
    }

    /* bounded relation search: one exact kernel computation over the
     * coefficients of candidate polynomials h', constrained so that the
     * combination sum c_mu * f^mu vanishes through validity */
    const int p = tuple_prec(f);
    std::vector<MultiIndex> cols;
    for (const MultiIndex& mu : monomials_up_to_degree(h.np, relation_degree_bound))
        if (mu.degree() >= 1) cols.push_back(mu);
    std::vector<TruncatedSeries> powers;
    powers.reserve(cols.size());
    for (const MultiIndex& mu : cols) {
        TruncatedSeries prod = TruncatedSeries::constant(h.n, p, rat(1));
        for (int j = 0; j < h.np; ++j)
            if (mu[j] > 0) prod = mul(prod, pow_series(f[j], mu[j]));
        powers.push_back(std::move(prod));
    }
    std::map<MultiIndex, int, GradedLexLess> row_of;
    for (const TruncatedSeries& s : powers)
        for (const auto& [mono, c] : s.terms)
            row_of.emplace(mono, static_cast<int>(row_of.size()));
    QVec kernel;
    if (row_of.empty()) {
        /* every candidate already annihilates f (all powers vanish) */
        kernel.assign(cols.size(), ComplexRational());
        kernel[0] = rat(1);
    } else {
        QMat a(row_of.size(), QVec(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c)
            for (const auto& [mono, v] : powers[c].terms) a[row_of.at(mono)][c] = v;
        std::optional<QVec> k = kernel_vector(a);
        if (!k) return rep; /* Inconclusive */
        kernel = std::move(*k);
    }
    TruncatedSeries hrel = TruncatedSeries::zero(h.np, p);
    for (size_t c = 0; c < cols.size(); ++c) hrel.add_term(cols[c], kernel[c]);
    if (hrel.is_zero() || !compose(hrel, f).is_zero()) return rep; /* Inconclusive */
    rep.relation = std::move(hrel);
    rep.status = SegreHomReport::Status::NotInjective;
    return rep;
}

DegeneracyReport total_degeneracy_test(const GenericSubmanifoldNF& m,
                                       const GenericSubmanifoldNF& mp, const FormalMapNF& h) {
    require_cond(h.n == m.n && h.d == m.d && h.np == mp.n && h.dp == mp.d,
                 "degeneracy test: dimensions must match the submanifolds");
    require_cond(h.n == h.np, "degeneracy test: equal z-dimensions required");
    SeriesTuple f = segre_restriction(h);
    DegeneracyReport rep;
    rep.determinant = series_det(jacobian(f));
    rep.degenerate = rep.determinant.is_zero();
    return rep;
}

std::optional<FormalVectorField> kernel_vector_field(const SeriesTuple& f, int coeff_degree_bound) {
    require_cond(!f.empty(), "kernel field: no components");
    const int nv = f[0].nvars;
    const int p = tuple_prec(f);
    require_cond(p >= 1, "kernel field: validity order must be at least 1");
    if (coeff_degree_bound < 0) coeff_degree_bound = p / 2;

    /* uniform validity keeps the constraint matrix and the verification in
     * exact agreement */
    SeriesTuple fu;
    for (const TruncatedSeries& comp : f) fu.push_back(truncate_to(comp, p));
    std::vector<std::vector<TruncatedSeries>> df;
    for (const TruncatedSeries& comp : fu) {
        std::vector<TruncatedSeries> row;
        for (int i = 0; i < nv; ++i) row.push_back(derive(comp, i));
        df.push_back(std::move(row));
    }

    for (int deg = 0; deg <= coeff_degree_bound; ++deg) {
        std::vector<MultiIndex> monos = monomials_up_to_degree(nv, deg);
        /* columns: slot-major over (i, monomial); entries of column (i, m)
         * are the coefficients of x^m * d f_j / d x_i */
        std::vector<TruncatedSeries> col_series;
        std::vector<std::pair<int, MultiIndex>> col_key;
        for (int i = 0; i < nv; ++i)
            for (const MultiIndex& mo : monos) col_key.emplace_back(i, mo);
        std::vector<std::map<MultiIndex, int, GradedLexLess>> row_of(f.size());
        std::vector<std::vector<TruncatedSeries>> contrib(col_key.size());
        for (size_t c = 0; c < col_key.size(); ++c) {
            auto [i, mo] = col_key[c];
            TruncatedSeries xm = TruncatedSeries::monomial(nv, mo, rat(1), p - 1);
            for (size_t j = 0; j < fu.size(); ++j) {
                TruncatedSeries s = mul(xm, df[j][i]);
                for (const auto& [mono, v] : s.terms)
                    row_of[j].emplace(mono, static_cast<int>(row_of[j].size()));
                contrib[c].push_back(std::move(s));
            }
        }
        std::vector<int> row_offset(f.size() + 1, 0);
        for (size_t j = 0; j < f.size(); ++j)
            row_offset[j + 1] = row_offset[j] + static_cast<int>(row_of[j].size());
        if (row_offset.back() == 0) continue; /* all derivatives vanish: f constant */
        QMat a(row_offset.back(), QVec(col_key.size()));
        for (size_t c = 0; c < col_key.size(); ++c)
            for (size_t j = 0; j < f.size(); ++j)
                for (const auto& [mono, v] : contrib[c][j].terms)
                    a[row_offset[j] + row_of[j].at(mono)][c] = v;
        std::optional<QVec> k = kernel_vector(a);
        if (!k) continue;
        FormalVectorField x;
        x.coeff = tuple_zero(nv, nv, p);
        for (size_t c = 0; c < col_key.size(); ++c)
            x.coeff[col_key[c].first].add_term(col_key[c].second, (*k)[c]);
        normalize_field(x);
        bool ok = true;
        for (const TruncatedSeries& comp : fu)
            if (!apply_field(x, comp).is_zero()) {
                ok = false;
                break;
            }
        if (ok) return x;
    }
    return std::nullopt;
}

DichotomyReport hypersurface_dichotomy(const GenericSubmanifoldNF& m,
                                       const GenericSubmanifoldNF& mp, const FormalMapNF& h) {
    require_cond(m.d == 1 && mp.d == 1, "hypersurface alternative: codimension one required");
    require_cond(essential_finiteness_test(m).essentially_finite(),
                 "hypersurface alternative: source is not essentially finite");
    require_cond(check_sends(m, mp, h).sends,
                 "hypersurface alternative: map does not send the source into the target");

    DichotomyReport rep;
    if (tuple_zero_through(h.G, h.prec())) {
        /* transversal component vanishes: the graph series composed with
         * (F, Fbar, 0) must already reduce to zero on the source */
        SeriesTuple Ff = to_full_plain(h.F, m);
        SeriesTuple Fb = to_full_bar(h.F, m);
        SeriesTuple zero_t = tuple_zero(mp.d, m.fdim(), h.prec());
        SeriesTuple subs = target_subs(mp, Ff, Fb, zero_t);
        TruncatedSeries res = reduce_mod_m(m, compose(mp.Q[0], subs));
        require_cond(res.is_zero(), "hypersurface alternative: inconsistent transversal reduction");
        if (tuple_zero_through(h.F, h.prec())) {
            rep.status = DichotomyReport::Status::ZeroMap;
            rep.detail = "the map vanishes identically through the validity order";
            return rep;
        }
        /* F != 0 with zero transversal component: the image of any source
         * curve along which F is nonzero lies inside the target */
        rep.status = DichotomyReport::Status::Violation;
        rep.detail = "nonzero tangential components with zero transversal component: "
                     "the target contains a formal curve candidate";
        for (int i = 0; i < h.svars() && rep.curve.empty(); ++i) {
            SeriesTuple c = tuple_zero(h.svars(), 1, h.prec());
            c[i] = TruncatedSeries::variable(1, 0, h.prec());
            SeriesTuple img = compose_tuple(h.F, c);
            if (tuple_zero_through(img, h.prec())) continue;
            img.push_back(TruncatedSeries::zero(1, h.prec()));
            rep.curve = std::move(img);
        }
        if (rep.curve.empty()) {
            SeriesTuple c;
            for (int i = 0; i < h.svars(); ++i)
                c.push_back(TruncatedSeries::monomial(1, MultiIndex{i + 1}, rat(1), h.prec()));
            SeriesTuple img = compose_tuple(h.F, c);
            img.push_back(TruncatedSeries::zero(1, h.prec()));
            rep.curve = std::move(img);
        }
        return rep;
    }
    FiniteMapReport fm = finite_map_test(segre_restriction(h));
    rep.evidence = fm.staircase;
    if (fm.finite()) {
        rep.status = DichotomyReport::Status::SegreInjective;
        rep.detail = "z -> F(z, 0) generates an ideal of finite codimension";
    } else {
        rep.status = DichotomyReport::Status::Violation;
        rep.detail = "finiteness of z -> F(z, 0) could not be certified at this order";
        if (fm.curve) rep.curve = fm.curve->mu;
    }
    return rep;
}

}  // namespace crforge
