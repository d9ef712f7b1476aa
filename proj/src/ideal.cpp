#include "crforge/ideal.hpp"

#include <algorithm>
#include <map>

namespace crforge {

namespace {

int max_generator_degree(const SeriesTuple& gens) {
    int d = 0;
    for (const auto& g : gens) d = std::max(d, g.max_degree());
    return d;
}

TruncatedSeries zero_block(const TruncatedSeries& f, const std::vector<int>& vars) {
    TruncatedSeries r = f;
    for (int v : vars) r = set_var_zero(r, v);
    return r;
}

/* vanishing order of f along var alone (all other variables set to 0);
 * returns prec+1 when that restriction vanishes through validity */
int distinguished_order(const TruncatedSeries& f, int var) {
    TruncatedSeries g = f;
    for (int v = 0; v < f.nvars; ++v)
        if (v != var) g = set_var_zero(g, v);
    return g.ord();
}

/* span of { trunc_m(x^beta * g) : |beta| + ord(g) <= m } inside the space of
 * polynomials of degree <= m, columns ordered descending graded-lex so pivots
 * sit on the largest monomials and the non-pivot columns form the cobasis */
struct LevelSpace {
    std::vector<MultiIndex> cols; /* descending graded-lex */
    std::map<MultiIndex, int, GradedLexLess> index;
    RowSpace space;

    LevelSpace(const SeriesIdeal& ideal, int m) : space(0) {
        const int nv = ideal.nvars();
        std::vector<MultiIndex> asc = monomials_up_to_degree(nv, m);
        cols.assign(asc.rbegin(), asc.rend());
        for (int i = 0; i < static_cast<int>(cols.size()); ++i) index.emplace(cols[i], i);
        space = RowSpace(static_cast<int>(cols.size()));
        for (const auto& g : ideal.gens) {
            const int og = g.ord();
            if (og > m) continue;
            for (const auto& beta : monomials_up_to_degree(nv, m - og)) {
                QVec row(cols.size());
                for (const auto& [mi, c] : g.terms) {
                    MultiIndex shifted = beta + mi;
                    if (shifted.degree() <= m) row[index.at(shifted)] += c;
                }
                space.insert(std::move(row));
            }
        }
    }

    bool contains_monomial(const MultiIndex& mi) const {
        QVec v(cols.size());
        v[index.at(mi)] = rat(1);
        return space.contains(std::move(v));
    }
    bool captures_degree(int d) const {
        for (const auto& mi : monomials_of_degree(static_cast<int>(cols[0].size()), d))
            if (!contains_monomial(mi)) return false;
        return true;
    }
};

}  // namespace

std::optional<MemberWitness> membership_bounded(const TruncatedSeries& f, const SeriesIdeal& ideal,
                                                int cofactor_degree) {
    if (ideal.gens.empty()) throw series_error("membership_bounded: no generators");
    if (cofactor_degree < 0) throw series_error("membership_bounded: negative cofactor degree");
    const int nv = f.nvars;
    for (const auto& g : ideal.gens)
        if (g.nvars != nv) throw series_error("membership_bounded: variable-count mismatch");

    const int order =
        std::min({f.prec, ideal.prec(), cofactor_degree + max_generator_degree(ideal.gens)});
    const int ngens = static_cast<int>(ideal.gens.size());
    const std::vector<MultiIndex> betas = monomials_up_to_degree(nv, cofactor_degree);
    const int ncols = ngens * static_cast<int>(betas.size());

    const std::vector<MultiIndex> row_monomials = monomials_up_to_degree(nv, order);
    std::map<MultiIndex, int, GradedLexLess> row_of;
    for (int i = 0; i < static_cast<int>(row_monomials.size()); ++i)
        row_of.emplace(row_monomials[i], i);

    QMat a(row_monomials.size(), QVec(ncols));
    std::vector<bool> touched(row_monomials.size(), false);
    for (int k = 0; k < ngens; ++k)
        for (int bi = 0; bi < static_cast<int>(betas.size()); ++bi) {
            const int col = k * static_cast<int>(betas.size()) + bi;
            for (const auto& [mi, c] : ideal.gens[k].terms) {
                MultiIndex shifted = betas[bi] + mi;
                if (shifted.degree() > order) continue;
                const int row = row_of.at(shifted);
                a[row][col] += c;
                touched[row] = true;
            }
        }

    /* drop rows no cofactor can reach; an unreachable row with a nonzero
     * target is already inconsistent */
    QMat a_used;
    QVec b_used;
    for (int i = 0; i < static_cast<int>(row_monomials.size()); ++i) {
        ComplexRational target = f.coeff(row_monomials[i]);
        if (!touched[i]) {
            if (!target.is_zero()) return std::nullopt;
            continue;
        }
        a_used.push_back(std::move(a[i]));
        b_used.push_back(target);
    }

    auto sol = solve_linear(std::move(a_used), std::move(b_used));
    if (!sol) return std::nullopt;

    MemberWitness w;
    w.verified_through = order;
    for (int k = 0; k < ngens; ++k) {
        TruncatedSeries c(nv, ideal.prec());
        for (int bi = 0; bi < static_cast<int>(betas.size()); ++bi)
            c.add_term(betas[bi], (*sol)[k * betas.size() + bi]);
        w.cofactors.push_back(std::move(c));
    }

    TruncatedSeries recon = TruncatedSeries::zero(nv, ideal.prec());
    for (int k = 0; k < ngens; ++k) recon = add(recon, mul(w.cofactors[k], ideal.gens[k]));
    if (!is_zero_through(sub(recon, f), order))
        throw series_error("membership_bounded: witness failed recheck");
    return w;
}

StaircaseReport staircase_codim(const SeriesIdeal& ideal, int degree_bound) {
    StaircaseReport rep;
    if (ideal.gens.empty()) {
        rep.bound = degree_bound;
        return rep;
    }
    const int nv = ideal.nvars();
    for (const auto& g : ideal.gens)
        if (g.nvars != nv) throw series_error("staircase_codim: variable-count mismatch");
    rep.bound = std::min(degree_bound, ideal.prec());
    if (rep.bound < 1) throw series_error("staircase_codim: degree bound below 1");

    for (const auto& g : ideal.gens)
        if (!g.constant_term().is_zero()) {
            /* a unit generator spans everything */
            rep.status = StaircaseReport::Status::Finite;
            rep.codim = 0;
            rep.capture_degree = 0;
            return rep;
        }

    for (int m = 1; m <= rep.bound; ++m) {
        LevelSpace level(ideal, m);
        rep.level_ranks.push_back(level.space.rank());
        if (!level.captures_degree(m)) continue;

        /* once one degree level lies in the span, every later level must too;
         * re-check them all as an internal consistency guard */
        for (int mu = m + 1; mu <= rep.bound; ++mu) {
            LevelSpace upper(ideal, mu);
            if (!upper.captures_degree(mu))
                throw series_error("staircase_codim: capture lost at a higher level");
        }

        rep.status = StaircaseReport::Status::Finite;
        rep.capture_degree = m;
        rep.codim = static_cast<int>(level.cols.size()) - level.space.rank();
        std::vector<bool> is_pivot(level.cols.size(), false);
        for (int p : level.space.pivot_columns()) is_pivot[p] = true;
        for (int i = 0; i < static_cast<int>(level.cols.size()); ++i)
            if (!is_pivot[i]) rep.cobasis.push_back(level.cols[i]);
        std::sort(rep.cobasis.begin(), rep.cobasis.end(), graded_lex_less);
        return rep;
    }
    return rep;
}

PairElimination eliminate_pair(const TruncatedSeries& f1, const TruncatedSeries& f2, int x_var,
                               int y_var, const std::vector<int>& z2_vars,
                               int member_cofactor_degree) {
    if (f1.nvars != f2.nvars) throw series_error("eliminate_pair: variable-count mismatch");
    const int nv = f1.nvars;
    if (x_var < 0 || x_var >= nv || y_var < 0 || y_var >= nv || x_var == y_var)
        throw series_error("eliminate_pair: bad variable slots");
    for (int z : z2_vars)
        if (z < 0 || z >= nv || z == x_var || z == y_var)
            throw series_error("eliminate_pair: z2 block overlaps distinguished variables");

    PolyInX p1 = poly_from_series(f1, x_var);
    const int n = p1.degree();
    if (n < 1) throw series_error("eliminate_pair: first input has no distinguished degree");
    TruncatedSeries lead = p1.coeff(n);
    if (!equal_on_common(lead, TruncatedSeries::constant(nv, lead.prec, rat(1))))
        throw series_error("eliminate_pair: first input is not monic in the eliminated variable");
    for (int j = 0; j < n; ++j)
        if (!p1.coeff(j).constant_term().is_zero())
            throw series_error("eliminate_pair: lower coefficient does not vanish at the origin");

    /* second input must reduce to a pure power of the surviving variable when
     * the z2 block is set to zero */
    TruncatedSeries f2_0 = zero_block(f2, z2_vars);
    if (f2_0.terms.size() != 1)
        throw series_error("eliminate_pair: second input is not a power of the surviving variable "
                           "modulo the z2 block");
    const auto& [mono, coef] = *f2_0.terms.begin();
    int m = mono[y_var];
    {
        bool pure = coef == rat(1) && m >= 1;
        for (int v = 0; v < nv && pure; ++v)
            if (v != y_var && mono[v] != 0) pure = false;
        if (!pure)
            throw series_error("eliminate_pair: second input is not a monic power of the "
                               "surviving variable modulo the z2 block");
    }

    PairElimination out;
    out.n = n;
    out.m = m;
    out.resultant = resultant_in_x(p1, poly_from_series(f2, x_var));
    out.r = pow_series(out.resultant, n);

    if (poly_from_series(out.r, x_var).degree() > 0)
        throw series_error("eliminate_pair: eliminated variable survived");

    TruncatedSeries r0 = zero_block(out.r, z2_vars);
    const int target = m * n * n;
    TruncatedSeries expected = TruncatedSeries::zero(nv, out.r.prec);
    if (target <= out.r.prec) {
        MultiIndex tm(nv);
        tm[y_var] = target;
        expected.add_term(tm, rat(1));
    }
    if (!equal_on_common(r0, expected))
        throw series_error("eliminate_pair: result does not reduce to the expected pure power");
    out.shape_verified_through = std::min(r0.prec, expected.prec);

    if (member_cofactor_degree >= 0) {
        SeriesIdeal pair_ideal{{f1, f2}};
        out.membership = membership_bounded(out.r, pair_ideal, member_cofactor_degree);
    }
    return out;
}

std::vector<MonicComponent> monicize_system(const SeriesTuple& f, int u_count,
                                            int member_cofactor_degree) {
    if (f.empty()) throw series_error("monicize_system: empty system");
    const int nv = f[0].nvars;
    for (const auto& g : f)
        if (g.nvars != nv) throw series_error("monicize_system: variable-count mismatch");
    if (u_count < 0 || u_count >= nv) throw series_error("monicize_system: invalid block split");
    const int q = nv - u_count;
    const int common_prec = tuple_prec(f);

    /* precondition: at u = 0 the system generates a finite-codimension ideal
     * in the v block, so each v-variable is integral over it */
    {
        std::vector<int> where(nv, 0);
        for (int j = 0; j < q; ++j) where[u_count + j] = j;
        SeriesTuple restricted;
        for (const auto& g : f) {
            TruncatedSeries g0 = g;
            for (int i = 0; i < u_count; ++i) g0 = set_var_zero(g0, i);
            TruncatedSeries r = remap_vars(g0, q, where);
            if (!r.is_zero()) restricted.push_back(std::move(r));
        }
        if (restricted.empty())
            throw series_error("monicize_system: system vanishes on the distinguished block");
        StaircaseReport rep = staircase_codim(SeriesIdeal{restricted}, common_prec);
        if (!rep.finite())
            throw series_error("monicize_system: distinguished block is not of finite "
                               "codimension within the degree bound");
    }

    const SeriesIdeal full{f};
    std::vector<MonicComponent> out;
    for (int j = 0; j < q; ++j) {
        const int target = u_count + j;
        SeriesTuple live;
        for (const auto& g : f)
            if (!g.is_zero()) live.push_back(g);
        std::vector<int> kill;
        for (int v = u_count; v < nv; ++v)
            if (v != target) kill.push_back(v);

        while (!kill.empty()) {
            int best_var = -1, best_n = INT32_MAX;
            size_t best_si = 0;
            for (int x : kill)
                for (size_t si = 0; si < live.size(); ++si) {
                    int dn = distinguished_order(live[si], x);
                    if (dn == 0) throw series_error("monicize_system: generator is a unit");
                    if (dn <= live[si].prec && dn < best_n) {
                        best_n = dn;
                        best_var = x;
                        best_si = si;
                    }
                }
            if (best_var < 0)
                throw series_error("monicize_system: no generator is regular in a variable "
                                   "pending elimination");
            WeierstrassData w = weierstrass_prepare(live[best_si], best_var);
            SeriesTuple next;
            for (size_t si = 0; si < live.size(); ++si) {
                if (si == best_si) continue;
                PolyInX pt = poly_from_series(live[si], best_var);
                if (pt.degree() <= 0) {
                    next.push_back(live[si]);
                    continue;
                }
                TruncatedSeries res = resultant_in_x(w.monic, pt);
                if (!res.is_zero()) next.push_back(std::move(res));
            }
            if (next.empty())
                throw series_error("monicize_system: elimination emptied the system");
            live = std::move(next);
            kill.erase(std::find(kill.begin(), kill.end(), best_var));
        }

        int best_si = -1, best_n = INT32_MAX;
        for (size_t si = 0; si < live.size(); ++si) {
            int dn = distinguished_order(live[si], target);
            if (dn == 0) throw series_error("monicize_system: generator is a unit");
            if (dn <= live[si].prec && dn < best_n) {
                best_n = dn;
                best_si = static_cast<int>(si);
            }
        }
        if (best_si < 0)
            throw series_error("monicize_system: no survivor is regular in the target variable");
        WeierstrassData w = weierstrass_prepare(live[best_si], target);

        for (const auto& c : w.monic.coeffs)
            for (const auto& [mi, val] : c.terms)
                for (int v = u_count; v < nv; ++v)
                    if (mi[v] != 0)
                        throw series_error("monicize_system: coefficient escaped the "
                                           "parameter block");

        TruncatedSeries as_series = series_from_poly(w.monic, target);
        const int bound = member_cofactor_degree >= 0 ? member_cofactor_degree : common_prec;
        /* a degree-bounded cofactor can only certify one order past its own
         * degree; certify against the correspondingly truncated system */
        std::optional<MemberWitness> witness;
        if (bound + 1 < common_prec) {
            SeriesIdeal cert;
            for (const auto& g : f) cert.gens.push_back(truncate_to(g, bound + 1));
            witness = membership_bounded(truncate_to(as_series, bound + 1), cert, bound);
        } else {
            witness = membership_bounded(as_series, full, bound);
        }
        if (!witness)
            throw series_error("monicize_system: no cofactor certificate at the degree bound");
        out.push_back(MonicComponent{target, w.monic, *witness});
    }
    return out;
}

std::optional<int> verify_curve(const SeriesTuple& gens, const SeriesTuple& mu, bool exact_gens) {
    if (gens.empty()) throw series_error("verify_curve: empty system");
    if (static_cast<int>(mu.size()) != gens[0].nvars)
        throw series_error("verify_curve: arity mismatch");
    int through = INT32_MAX;
    for (const auto& g : gens) {
        TruncatedSeries pulled = compose(g, mu, exact_gens);
        if (!pulled.is_zero()) return std::nullopt;
        through = std::min(through, pulled.prec);
    }
    return through;
}

std::optional<CurveWitness> find_monomial_curve(const SeriesTuple& gens, int max_exponent,
                                                int breadth) {
    if (gens.empty()) throw series_error("find_monomial_curve: empty system");
    const int nv = gens[0].nvars;
    /* the generators' term lists are treated as exhaustive polynomials, so
     * give the curve enough headroom that no product term can hide beyond
     * the validity order */
    const int prec = std::max(tuple_prec(gens), max_generator_degree(gens) * std::max(1, max_exponent));
    std::vector<ComplexRational> pool = {rat(1),  rat(-1), rat(2),  rat(-2),
                                         rat(1, 2), rat(-1, 2), rat(3), rat(-3),
                                         ComplexRational::i(), -ComplexRational::i()};
    breadth = std::max(1, std::min<int>(breadth, static_cast<int>(pool.size())));
    max_exponent = std::max(1, max_exponent);
    long budget = 200000;

    for (int size = 1; size <= nv; ++size) {
        /* subsets of the variable slots, lexicographic */
        std::vector<int> idx(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            std::vector<int> exps(size, 1);
            while (true) {
                std::vector<int> cpick(size, 0);
                while (true) {
                    SeriesTuple mu = tuple_zero(nv, 1, prec);
                    for (int i = 0; i < size; ++i) {
                        MultiIndex mi(1);
                        mi[0] = exps[i];
                        mu[idx[i]] = TruncatedSeries::monomial(1, mi, pool[cpick[i]], prec);
                    }
                    if (--budget < 0) return std::nullopt;
                    if (auto through = verify_curve(gens, mu, /*exact_gens=*/true))
                        return CurveWitness{std::move(mu), *through};
                    int pos = size - 1;
                    while (pos >= 0 && ++cpick[pos] == breadth) cpick[pos--] = 0;
                    if (pos < 0) break;
                }
                int pos = size - 1;
                while (pos >= 0 && ++exps[pos] > max_exponent) exps[pos--] = 1;
                if (pos < 0) break;
            }
            /* next subset */
            int pos = size - 1;
            while (pos >= 0 && idx[pos] == nv - size + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    return std::nullopt;
}

}  // namespace crforge
