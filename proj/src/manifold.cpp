#include "crforge/manifold.hpp"

#include <algorithm>

#include "crforge/poly_in_x.hpp"
#include "crforge/series_ops.hpp"

namespace crforge {
namespace {

void require_cond(bool ok, const char* msg) {
    if (!ok) throw series_error(msg);
}

/* Q-space slot -> full-space slot, plain embedding (z->z, chi->chi, tau->tau) */
std::vector<int> q_embed(const GenericSubmanifoldNF& m) {
    std::vector<int> where(m.qdim());
    for (int i = 0; i < m.n; ++i) where[i] = m.z_slot(i);
    for (int i = 0; i < m.n; ++i) where[m.n + i] = m.chi_slot(i);
    for (int l = 0; l < m.d; ++l) where[2 * m.n + l] = m.tau_slot(l);
    return where;
}

/* embedding for the conjugated graph series: its argument blocks (chi, z, w)
 * land on the full-space slots chi, z, w */
std::vector<int> q_embed_bar(const GenericSubmanifoldNF& m) {
    std::vector<int> where(m.qdim());
    for (int i = 0; i < m.n; ++i) where[i] = m.chi_slot(i);
    for (int i = 0; i < m.n; ++i) where[m.n + i] = m.z_slot(i);
    for (int l = 0; l < m.d; ++l) where[2 * m.n + l] = m.w_slot(l);
    return where;
}

TruncatedSeries homogeneous_part(const TruncatedSeries& f, int deg) {
    TruncatedSeries r(f.nvars, f.prec);
    for (const auto& [mi, c] : f.terms)
        if (mi.degree() == deg) r.add_term(mi, c);
    return r;
}

std::vector<std::vector<TruncatedSeries>> drop_row_col(
    const std::vector<std::vector<TruncatedSeries>>& a, int skip_row, int skip_col) {
    std::vector<std::vector<TruncatedSeries>> r;
    for (int i = 0; i < (int)a.size(); ++i) {
        if (i == skip_row) continue;
        std::vector<TruncatedSeries> row;
        for (int j = 0; j < (int)a.size(); ++j)
            if (j != skip_col) row.push_back(a[i][j]);
        r.push_back(std::move(row));
    }
    return r;
}

/* inverse of a square series matrix with invertible constant term, via the
 * adjugate; entry validity follows the usual min rule */
std::vector<std::vector<TruncatedSeries>> invert_series_matrix(
    const std::vector<std::vector<TruncatedSeries>>& a) {
    int d = (int)a.size();
    TruncatedSeries inv_det = invert_unit(series_det(a));
    std::vector<std::vector<TruncatedSeries>> inv(d, std::vector<TruncatedSeries>(d));
    if (d == 1) {
        inv[0][0] = inv_det;
        return inv;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            TruncatedSeries cof = series_det(drop_row_col(a, j, i));
            if ((i + j) % 2) cof = negate(cof);
            inv[i][j] = mul(cof, inv_det);
        }
    return inv;
}

/* pick column indices carrying an invertible d x d block; the trailing block
 * is preferred so already-straightened inputs keep their coordinate order */
std::vector<int> pick_block_columns(const QMat& a0, int ncols, int d) {
    auto sub_rank = [&](const std::vector<int>& cols) {
        QMat s(a0.size());
        for (size_t r = 0; r < a0.size(); ++r)
            for (int c : cols) s[r].push_back(a0[r][c]);
        return matrix_rank_with_minor(s).rank;
    };
    if (ncols >= d) {
        std::vector<int> last;
        for (int c = ncols - d; c < ncols; ++c) last.push_back(c);
        if (sub_rank(last) == d) return last;
    }
    std::vector<int> chosen;
    for (int c = ncols - 1; c >= 0 && (int)chosen.size() < d; --c) {
        std::vector<int> trial = chosen;
        trial.push_back(c);
        if (sub_rank(trial) == (int)trial.size()) chosen = trial;
    }
    require_cond((int)chosen.size() == d, "defining data: distinguished columns are degenerate");
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

/* solve sum_m A[l][m] c[m] = -rhs[l] given the inverse of A */
SeriesTuple solve_column(const std::vector<std::vector<TruncatedSeries>>& a_inv,
                         const SeriesTuple& rhs) {
    int d = (int)a_inv.size();
    SeriesTuple c;
    for (int m = 0; m < d; ++m) {
        TruncatedSeries acc(rhs[0].nvars, rhs[0].prec);
        for (int l = 0; l < d; ++l) acc = add(acc, mul(a_inv[m][l], rhs[l]));
        c.push_back(negate(acc));
    }
    return c;
}

struct ZetaFrame {
    std::vector<int> cols;  /* distinguished zeta-block indices, ascending */
    std::vector<int> rest;  /* complementary indices, ascending */
    std::vector<std::vector<TruncatedSeries>> a_inv;
};

ZetaFrame zeta_frame(const DefiningData& def) {
    ZetaFrame zf;
    QMat a0(def.d, QVec(def.N));
    for (int l = 0; l < def.d; ++l)
        for (int k = 0; k < def.N; ++k)
            a0[l][k] = def.rho[l].coeff(MultiIndex::unit(2 * def.N, def.N + k));
    zf.cols = pick_block_columns(a0, def.N, def.d);
    std::vector<char> used(def.N, 0);
    for (int c : zf.cols) used[c] = 1;
    for (int k = 0; k < def.N; ++k)
        if (!used[k]) zf.rest.push_back(k);
    std::vector<std::vector<TruncatedSeries>> a(def.d, std::vector<TruncatedSeries>(def.d));
    for (int l = 0; l < def.d; ++l)
        for (int m = 0; m < def.d; ++m) a[l][m] = derive(def.rho[l], def.N + zf.cols[m]);
    zf.a_inv = invert_series_matrix(a);
    return zf;
}

/* essential generators together with the jet order each one came from */
SeriesTuple essential_with_degrees(const GenericSubmanifoldNF& m, int alpha_bound,
                                   std::vector<int>* degs) {
    int p = m.prec();
    SeriesTuple qb = q_bar_full(m);
    std::vector<int> chi_block;
    std::vector<int> zmap(m.fdim(), -1);
    for (int i = 0; i < m.n; ++i) {
        chi_block.push_back(m.chi_slot(i));
        zmap[m.z_slot(i)] = i;
    }
    SeriesTuple out;
    for (int deg = 1; deg <= alpha_bound; ++deg) {
        for (const MultiIndex& alpha : monomials_of_degree(m.n, deg)) {
            for (int j = 0; j < m.d; ++j) {
                TruncatedSeries g = block_coefficient(qb[j], chi_block, alpha);
                for (int l = 0; l < m.d; ++l) g = set_var_zero(g, m.w_slot(l));
                g = remap_vars(g, m.n, zmap);
                /* the chi^alpha coefficient is only determined through p - |alpha| */
                g = truncate_to(g, p - deg);
                out.push_back(g);
                if (degs) degs->push_back(deg);
            }
        }
    }
    return out;
}

}  // namespace

GenericSubmanifoldNF make_manifold(int n, int d, SeriesTuple q) {
    require_cond(n >= 1 && d >= 1, "manifold: need n >= 1 and d >= 1");
    require_cond((int)q.size() == d, "manifold: expected one graph series per codimension");
    GenericSubmanifoldNF m;
    m.n = n;
    m.d = d;
    m.Q = std::move(q);
    for (int l = 0; l < d; ++l)
        require_cond(m.Q[l].nvars == m.qdim(), "manifold: graph series variable count mismatch");
    int p = m.prec();
    require_cond(p >= 1, "manifold: validity order must be positive");
    for (int l = 0; l < d; ++l) {
        TruncatedSeries tau = TruncatedSeries::variable(m.qdim(), 2 * n + l, m.Q[l].prec);
        TruncatedSeries z_slice = m.Q[l], chi_slice = m.Q[l];
        for (int i = 0; i < n; ++i) z_slice = set_var_zero(z_slice, i);
        for (int i = 0; i < n; ++i) chi_slice = set_var_zero(chi_slice, n + i);
        require_cond(is_zero_through(sub(z_slice, tau), z_slice.prec),
                     "manifold: normality fails on the z = 0 slice");
        require_cond(is_zero_through(sub(chi_slice, tau), chi_slice.prec),
                     "manifold: normality fails on the chi = 0 slice");
    }
    /* reality of the generated ideal: the conjugated generator family must
     * reduce to zero against the graph substitution */
    for (const TruncatedSeries& g : ideal_generators(m, true)) {
        TruncatedSeries r = reduce_mod_m(m, g);
        require_cond(is_zero_through(r, r.prec),
                     "manifold: conjugated generators do not reduce to zero");
    }
    return m;
}

SeriesTuple q_full(const GenericSubmanifoldNF& m) {
    SeriesTuple out;
    std::vector<int> where = q_embed(m);
    for (const TruncatedSeries& q : m.Q) out.push_back(remap_vars(q, m.fdim(), where));
    return out;
}

SeriesTuple q_bar_full(const GenericSubmanifoldNF& m) {
    SeriesTuple out;
    std::vector<int> where = q_embed_bar(m);
    for (const TruncatedSeries& q : m.Q) out.push_back(remap_vars(bar_conjugate(q), m.fdim(), where));
    return out;
}

SeriesTuple ideal_generators(const GenericSubmanifoldNF& m, bool conjugate_family) {
    SeriesTuple out;
    SeriesTuple graph = conjugate_family ? q_bar_full(m) : q_full(m);
    for (int l = 0; l < m.d; ++l) {
        int slot = conjugate_family ? m.tau_slot(l) : m.w_slot(l);
        out.push_back(sub(TruncatedSeries::variable(m.fdim(), slot, graph[l].prec), graph[l]));
    }
    return out;
}

TruncatedSeries reduce_mod_m(const GenericSubmanifoldNF& m, const TruncatedSeries& f_full) {
    require_cond(f_full.nvars == m.fdim(), "reduce: expected a full-space series");
    int p = m.prec();
    SeriesTuple subs(m.fdim());
    for (int i = 0; i < m.n; ++i) subs[m.z_slot(i)] = TruncatedSeries::variable(m.qdim(), i, p);
    for (int l = 0; l < m.d; ++l) subs[m.w_slot(l)] = m.Q[l];
    for (int i = 0; i < m.n; ++i)
        subs[m.chi_slot(i)] = TruncatedSeries::variable(m.qdim(), m.n + i, p);
    for (int l = 0; l < m.d; ++l)
        subs[m.tau_slot(l)] = TruncatedSeries::variable(m.qdim(), 2 * m.n + l, p);
    return compose(f_full, subs);
}

TruncatedSeries apply_field(const FormalVectorField& x, const TruncatedSeries& f) {
    require_cond((int)x.coeff.size() == f.nvars, "apply_field: dimension mismatch");
    require_cond(f.prec >= 1, "apply_field: no derivative information left");
    TruncatedSeries acc(f.nvars, f.prec - 1);
    for (int i = 0; i < f.nvars; ++i) {
        /* coefficients that are zero through the target order contribute nothing */
        if (x.coeff[i].is_zero() && x.coeff[i].prec >= f.prec - 1) continue;
        acc = add(acc, mul(x.coeff[i], derive(f, i)));
    }
    return acc;
}

FormalVectorField field_bracket(const FormalVectorField& x, const FormalVectorField& y) {
    require_cond(x.coeff.size() == y.coeff.size(), "bracket: dimension mismatch");
    FormalVectorField r;
    for (size_t i = 0; i < x.coeff.size(); ++i)
        r.coeff.push_back(sub(apply_field(x, y.coeff[i]), apply_field(y, x.coeff[i])));
    return r;
}

bool is_type_01(const FormalVectorField& x, int n, int d) {
    require_cond((int)x.coeff.size() == 2 * (n + d), "type check: dimension mismatch");
    for (int s = 0; s < n + d; ++s)
        if (!x.coeff[s].is_zero()) return false;
    return true;
}

bool is_type_10(const FormalVectorField& x, int n, int d) {
    require_cond((int)x.coeff.size() == 2 * (n + d), "type check: dimension mismatch");
    for (int s = n + d; s < 2 * (n + d); ++s)
        if (!x.coeff[s].is_zero()) return false;
    return true;
}

std::vector<FormalVectorField> cr_basis(const GenericSubmanifoldNF& m) {
    int p = m.prec();
    SeriesTuple qb = q_bar_full(m);
    std::vector<FormalVectorField> basis;
    for (int j = 0; j < m.n; ++j) {
        FormalVectorField f{tuple_zero(m.fdim(), m.fdim(), p)};
        f.coeff[m.chi_slot(j)] = TruncatedSeries::constant(m.fdim(), p, rat(1));
        for (int l = 0; l < m.d; ++l) f.coeff[m.tau_slot(l)] = derive(qb[l], m.chi_slot(j));
        basis.push_back(f);
    }
    return basis;
}

DefiningData make_defining(int N, int d, SeriesTuple rho) {
    require_cond(d >= 1 && N > d, "defining data: need N > d >= 1");
    require_cond((int)rho.size() == d, "defining data: expected one series per codimension");
    DefiningData def;
    def.N = N;
    def.d = d;
    def.rho = std::move(rho);
    int p = def.prec();
    require_cond(p >= 2, "defining data: validity order too small");
    std::vector<int> swap(2 * N);
    for (int k = 0; k < N; ++k) {
        swap[k] = N + k;
        swap[N + k] = k;
    }
    QMat a0(d, QVec(N));
    for (int l = 0; l < d; ++l) {
        require_cond(def.rho[l].nvars == 2 * N, "defining data: series variable count mismatch");
        require_cond(def.rho[l].constant_term().is_zero(), "defining data: must vanish at the origin");
        require_cond(equal_through(bar_conjugate(def.rho[l], &swap), def.rho[l], def.rho[l].prec),
                     "defining data: reality fails");
        for (int k = 0; k < N; ++k) a0[l][k] = def.rho[l].coeff(MultiIndex::unit(2 * N, k));
    }
    require_cond(matrix_rank_with_minor(a0).rank == d,
                 "defining data: differentials are not independent");
    return def;
}

std::vector<FormalVectorField> tangential_frame(const DefiningData& def) {
    ZetaFrame zf = zeta_frame(def);
    int nv = 2 * def.N;
    int p = def.prec();
    std::vector<FormalVectorField> frame;
    for (int j = 0; j < def.N; ++j) {
        SeriesTuple rhs;
        for (int l = 0; l < def.d; ++l) rhs.push_back(derive(def.rho[l], j));
        SeriesTuple s = solve_column(zf.a_inv, rhs);
        FormalVectorField f{tuple_zero(nv, nv, p)};
        f.coeff[j] = TruncatedSeries::constant(nv, p, rat(1));
        for (int m = 0; m < def.d; ++m) f.coeff[def.N + zf.cols[m]] = s[m];
        for (int l = 0; l < def.d; ++l) {
            TruncatedSeries t = apply_field(f, def.rho[l]);
            require_cond(is_zero_through(t, t.prec), "tangential frame: nonzero residual");
        }
        frame.push_back(f);
    }
    return frame;
}

SeriesTuple essential_generators_general(const DefiningData& def, int alpha_bound) {
    int p = def.prec();
    if (alpha_bound < 0) alpha_bound = 2 * p / 3;
    alpha_bound = std::min(alpha_bound, p - 1);
    ZetaFrame zf = zeta_frame(def);
    int nv = 2 * def.N;
    int n = def.N - def.d;
    /* tangent fields along the conjugate directions, coefficients frozen on
     * the first-factor axis */
    std::vector<FormalVectorField> frozen;
    for (int j = 0; j < n; ++j) {
        SeriesTuple rhs;
        for (int l = 0; l < def.d; ++l) rhs.push_back(derive(def.rho[l], def.N + zf.rest[j]));
        SeriesTuple c = solve_column(zf.a_inv, rhs);
        FormalVectorField lj{tuple_zero(nv, nv, p)};
        lj.coeff[def.N + zf.rest[j]] = TruncatedSeries::constant(nv, p, rat(1));
        for (int m = 0; m < def.d; ++m) lj.coeff[def.N + zf.cols[m]] = c[m];
        for (int l = 0; l < def.d; ++l) {
            TruncatedSeries t = apply_field(lj, def.rho[l]);
            require_cond(is_zero_through(t, t.prec), "conjugate frame: nonzero residual");
        }
        FormalVectorField xj = lj;
        for (int s = 0; s < nv; ++s)
            for (int k = 0; k < def.N; ++k) xj.coeff[s] = set_var_zero(xj.coeff[s], k);
        frozen.push_back(xj);
    }
    std::vector<int> zmap(nv, -1);
    for (int k = 0; k < def.N; ++k) zmap[k] = k;
    SeriesTuple out;
    for (int deg = 0; deg <= alpha_bound; ++deg) {
        for (const MultiIndex& alpha : monomials_of_degree(n, deg)) {
            for (int l = 0; l < def.d; ++l) {
                TruncatedSeries g = def.rho[l];
                for (int j = n - 1; j >= 0; --j)
                    for (int t = 0; t < alpha[j]; ++t) g = apply_field(frozen[j], g);
                for (int k = 0; k < def.N; ++k) g = set_var_zero(g, def.N + k);
                out.push_back(remap_vars(g, def.N, zmap));
            }
        }
    }
    return out;
}

Normalization normalize(const DefiningData& def) {
    int N = def.N, d = def.d, n = N - d, p = def.prec();
    /* 1. move d independent first-factor columns into the trailing block */
    QMat a0(d, QVec(N));
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < N; ++k) a0[l][k] = def.rho[l].coeff(MultiIndex::unit(2 * N, k));
    std::vector<int> wcols = pick_block_columns(a0, N, d);
    std::vector<int> perm(N, -1);
    {
        std::vector<char> is_w(N, 0);
        for (int c : wcols) is_w[c] = 1;
        int zi = 0, wi = 0;
        for (int k = 0; k < N; ++k) perm[k] = is_w[k] ? n + (wi++) : (zi++);
    }
    std::vector<int> where(2 * N);
    for (int k = 0; k < N; ++k) {
        where[k] = perm[k];
        where[N + k] = N + perm[k];
    }
    SeriesTuple rho_p = remap_tuple(def.rho, 2 * N, where);

    /* 2. solve the trailing block as a graph over (z, chi, tau) */
    int qdim = 2 * n + d;
    std::vector<int> where2(2 * N);
    for (int i = 0; i < n; ++i) where2[i] = i;
    for (int l = 0; l < d; ++l) where2[n + l] = qdim + l;
    for (int i = 0; i < n; ++i) where2[N + i] = n + i;
    for (int l = 0; l < d; ++l) where2[N + n + l] = 2 * n + l;
    SeriesTuple qt = implicit_solve(remap_tuple(rho_p, 2 * N, where2), qdim);

    /* 3. center-slice map kappa(t) and its functional square root U = kappa o Ubar */
    SeriesTuple kappa;
    {
        std::vector<int> tmap(qdim, -1);
        for (int l = 0; l < d; ++l) tmap[2 * n + l] = l;
        for (int l = 0; l < d; ++l) {
            TruncatedSeries g = qt[l];
            for (int s = 0; s < 2 * n; ++s) g = set_var_zero(g, s);
            kappa.push_back(remap_vars(g, d, tmap));
        }
    }
    {
        SeriesTuple kk = compose_tuple(kappa, bar_tuple(kappa));
        for (int l = 0; l < d; ++l)
            require_cond(equal_through(kk[l], TruncatedSeries::variable(d, l, p), kk[l].prec),
                         "normalize: center slice is not an involution");
    }
    bool kappa_id = true;
    for (int l = 0; l < d; ++l)
        if (!equal_through(kappa[l], TruncatedSeries::variable(d, l, p), p)) kappa_id = false;

    SeriesTuple u = identity_tuple(d, p);
    if (!kappa_id) {
        QMat b(d, QVec(d));
        for (int l = 0; l < d; ++l)
            for (int mm = 0; mm < d; ++mm) b[l][mm] = kappa[l].coeff(MultiIndex::unit(d, mm));
        /* linear part c + b * conj(c) is consistent for every c; pick an
         * invertible one */
        auto bu_from = [&](const QMat& c) {
            QMat bu(d, QVec(d));
            for (int l = 0; l < d; ++l)
                for (int mm = 0; mm < d; ++mm) {
                    ComplexRational s = c[l][mm];
                    for (int k = 0; k < d; ++k) s += b[l][k] * c[k][mm].conj();
                    bu[l][mm] = s;
                }
            return bu;
        };
        std::vector<QMat> cands;
        for (int mask = 0; mask < (1 << d); ++mask) {
            QMat c(d, QVec(d));
            for (int j = 0; j < d; ++j) c[j][j] = (mask >> j) & 1 ? ComplexRational::i() : rat(1);
            cands.push_back(c);
        }
        {
            RationalSampler smp(8191);
            for (int t = 0; t < 40; ++t) {
                QMat c(d, QVec(d));
                for (int r = 0; r < d; ++r)
                    for (int cc = 0; cc < d; ++cc) c[r][cc] = smp.next();
                cands.push_back(c);
            }
        }
        QMat bu;
        bool found = false;
        for (const QMat& c : cands) {
            bu = bu_from(c);
            if (matrix_rank_with_minor(bu).rank == d) {
                found = true;
                break;
            }
        }
        require_cond(found, "normalize: no invertible linear part for the square root");
        u = tuple_zero(d, d, p);
        for (int l = 0; l < d; ++l)
            for (int mm = 0; mm < d; ++mm)
                u[l] = add(u[l], scale(TruncatedSeries::variable(d, mm, p), bu[l][mm]));
        for (int deg = 2; deg <= p; ++deg) {
            SeriesTuple t = compose_tuple(kappa, bar_tuple(u));
            SeriesTuple r;
            for (int l = 0; l < d; ++l) r.push_back(homogeneous_part(t[l], deg));
            for (int l = 0; l < d; ++l) {
                TruncatedSeries s = r[l];
                for (int mm = 0; mm < d; ++mm) s = add(s, scale(bar_conjugate(r[mm]), b[l][mm]));
                require_cond(is_zero_through(s, s.prec), "normalize: square-root obstruction");
            }
            for (int l = 0; l < d; ++l) u[l] = add(u[l], scale(r[l], rat(1, 2)));
        }
        SeriesTuple chk = compose_tuple(kappa, bar_tuple(u));
        for (int l = 0; l < d; ++l)
            require_cond(equal_through(chk[l], u[l], chk[l].prec), "normalize: square-root defect");
    }

    /* 4. straighten the center: w = Phi(z, w') with Phi(z, t) = graph(z, 0, Ubar(t)) */
    int nzt = n + d;
    SeriesTuple subs_phi;
    for (int i = 0; i < n; ++i) subs_phi.push_back(TruncatedSeries::variable(nzt, i, p));
    for (int i = 0; i < n; ++i) subs_phi.push_back(TruncatedSeries::zero(nzt, p));
    {
        std::vector<int> tmap(d);
        for (int l = 0; l < d; ++l) tmap[l] = n + l;
        SeriesTuple ub = bar_tuple(u);
        for (int l = 0; l < d; ++l) subs_phi.push_back(remap_vars(ub[l], nzt, tmap));
    }
    SeriesTuple phi = compose_tuple(qt, subs_phi);

    SeriesTuple psi;
    {
        int nsys = n + 2 * d;
        std::vector<int> pmap(nzt);
        for (int i = 0; i < n; ++i) pmap[i] = i;
        for (int l = 0; l < d; ++l) pmap[n + l] = n + d + l;
        SeriesTuple sys;
        for (int l = 0; l < d; ++l)
            sys.push_back(sub(TruncatedSeries::variable(nsys, n + l, p),
                              remap_vars(phi[l], nsys, pmap)));
        psi = implicit_solve(sys, n + d);
    }

    /* 5. new graph data in the straightened coordinates */
    SeriesTuple subs_inner;
    for (int i = 0; i < n; ++i) subs_inner.push_back(TruncatedSeries::variable(qdim, i, p));
    for (int i = 0; i < n; ++i) subs_inner.push_back(TruncatedSeries::variable(qdim, n + i, p));
    {
        std::vector<int> bmap(nzt);
        for (int i = 0; i < n; ++i) bmap[i] = n + i;
        for (int l = 0; l < d; ++l) bmap[n + l] = 2 * n + l;
        for (int l = 0; l < d; ++l)
            subs_inner.push_back(remap_vars(bar_conjugate(phi[l]), qdim, bmap));
    }
    SeriesTuple inner = compose_tuple(qt, subs_inner);
    SeriesTuple subs_out;
    for (int i = 0; i < n; ++i) subs_out.push_back(TruncatedSeries::variable(qdim, i, p));
    for (int l = 0; l < d; ++l) subs_out.push_back(inner[l]);
    SeriesTuple qprime = compose_tuple(psi, subs_out);

    Normalization out;
    out.m = make_manifold(n, d, qprime);
    out.perm = perm;
    std::vector<int> inv(N);
    for (int k = 0; k < N; ++k) inv[perm[k]] = k;
    for (int i = 0; i < n; ++i)
        out.new_coords.push_back(TruncatedSeries::variable(N, inv[i], p));
    {
        SeriesTuple subs_h;
        for (int i = 0; i < n; ++i) subs_h.push_back(TruncatedSeries::variable(N, inv[i], p));
        for (int l = 0; l < d; ++l) subs_h.push_back(TruncatedSeries::variable(N, inv[n + l], p));
        SeriesTuple h = compose_tuple(psi, subs_h);
        for (int l = 0; l < d; ++l) out.new_coords.push_back(h[l]);
    }
    return out;
}

SeriesTuple segre_map(const GenericSubmanifoldNF& m, int k) {
    require_cond(k >= 0, "segre: negative index");
    int p = m.prec();
    if (k == 0) return tuple_zero(m.N(), 0, p);
    SeriesTuple v;
    for (int i = 0; i < m.n; ++i) v.push_back(TruncatedSeries::variable(m.n, i, p));
    for (int l = 0; l < m.d; ++l) v.push_back(TruncatedSeries::zero(m.n, p));
    for (int j = 1; j < k; ++j) {
        int nv = (j + 1) * m.n;
        std::vector<int> shift(j * m.n);
        for (int t = 0; t < (int)shift.size(); ++t) shift[t] = m.n + t;
        SeriesTuple vb;
        for (const TruncatedSeries& comp : v)
            vb.push_back(remap_vars(bar_conjugate(comp), nv, shift));
        SeriesTuple subs;
        for (int i = 0; i < m.n; ++i) subs.push_back(TruncatedSeries::variable(nv, i, p));
        for (int i = 0; i < m.n; ++i) subs.push_back(vb[i]);
        for (int l = 0; l < m.d; ++l) subs.push_back(vb[m.n + l]);
        SeriesTuple next;
        for (int i = 0; i < m.n; ++i) next.push_back(TruncatedSeries::variable(nv, i, p));
        for (int l = 0; l < m.d; ++l) next.push_back(compose(m.Q[l], subs));
        v = std::move(next);
    }
    return v;
}

bool verify_segre_identity(const GenericSubmanifoldNF& m, int k) {
    require_cond(k >= 0, "segre: negative index");
    int nv = (k + 1) * m.n;
    SeriesTuple vk1 = segre_map(m, k + 1);
    SeriesTuple vkb;
    if (k == 0) {
        vkb = tuple_zero(m.N(), nv, m.prec());
    } else {
        SeriesTuple vk = segre_map(m, k);
        std::vector<int> shift(k * m.n);
        for (int t = 0; t < (int)shift.size(); ++t) shift[t] = m.n + t;
        for (const TruncatedSeries& comp : vk)
            vkb.push_back(remap_vars(bar_conjugate(comp), nv, shift));
    }
    SeriesTuple subs(m.fdim());
    for (int i = 0; i < m.n; ++i) subs[m.z_slot(i)] = vk1[i];
    for (int l = 0; l < m.d; ++l) subs[m.w_slot(l)] = vk1[m.n + l];
    for (int i = 0; i < m.n; ++i) subs[m.chi_slot(i)] = vkb[i];
    for (int l = 0; l < m.d; ++l) subs[m.tau_slot(l)] = vkb[m.n + l];
    for (bool conj_family : {false, true})
        for (const TruncatedSeries& g : ideal_generators(m, conj_family)) {
            TruncatedSeries r = compose(g, subs);
            if (!is_zero_through(r, r.prec)) return false;
        }
    return true;
}

TypeReport finite_type_test(const GenericSubmanifoldNF& m, int k_max, uint64_t seed) {
    TypeReport rep;
    rep.full_rank = m.N();
    if (k_max < 0) k_max = 2 * (m.d + 1);
    std::vector<SeriesTuple> maps(1);
    int best = 0;
    for (int k = 1; k <= k_max && rep.k1 < 0; ++k) {
        maps.push_back(segre_map(m, k));
        RankResult rr = generic_rank(maps[k], false, seed + (uint64_t)k);
        best = std::max(best, rr.rank);
        rep.ranks.push_back(best);
        if (best == rep.full_rank) rep.k1 = k;
    }
    if (rep.k1 < 0) {
        /* certified deficiency at every step up to codimension + 1 rules the
         * full rank out at all steps, by rank monotonicity */
        bool all_deficient = true;
        for (int k = 1; k <= m.d + 1; ++k) {
            while ((int)maps.size() <= k) maps.push_back(segre_map(m, (int)maps.size()));
            RankResult rs = generic_rank(maps[k], true, seed + 100 + (uint64_t)k);
            if ((int)rep.ranks.size() >= k)
                rep.ranks[k - 1] = std::max(rep.ranks[k - 1], rs.rank);
            else
                rep.ranks.push_back(rs.rank);
            if (rs.rank == rep.full_rank) {
                rep.k1 = k;
                rep.symbolic = true;
                all_deficient = false;
                break;
            }
        }
        if (rep.k1 < 0) {
            if (all_deficient) {
                rep.status = TypeReport::Status::NoUpTo;
                rep.no_up_to = m.d + 1;
                rep.symbolic = true;
            }
            return rep;
        }
    }
    rep.status = TypeReport::Status::Yes;
    /* rational point in the zero fiber of the doubled map with full Jacobian
     * rank.  With the leading block at zero, equal odd blocks, and free even
     * blocks, the composition telescopes to zero from the inside by the
     * reflection identity Q(z, chi, Qbar(chi, z, w)) = w; membership is still
     * re-checked exactly and a failed draw is skipped, not fatal. */
    int mdeg = 2 * rep.k1;
    SeriesTuple v = segre_map(m, mdeg);
    int nv = mdeg * m.n;
    auto jac = jacobian(v);
    RationalSampler smp(seed * 1009 + 7);
    for (int attempt = 0; attempt < 24 && !rep.rank_point; ++attempt) {
        std::vector<ComplexRational> pt(nv);
        std::vector<ComplexRational> a = smp.point(m.n);
        for (int b = 1; b < mdeg; b += 2)
            for (int i = 0; i < m.n; ++i) pt[b * m.n + i] = a[i];
        for (int b = 2; b < mdeg; b += 2)
            for (int i = 0; i < m.n; ++i) pt[b * m.n + i] = smp.next();
        bool in_fiber = true;
        for (const TruncatedSeries& comp : v)
            if (!eval_at_point(comp, pt).is_zero()) {
                in_fiber = false;
                break;
            }
        if (!in_fiber) continue;
        QMat jv(v.size(), QVec(nv));
        for (size_t r = 0; r < v.size(); ++r)
            for (int c = 0; c < nv; ++c) jv[r][c] = eval_at_point(jac[r][c], pt);
        if (matrix_rank_with_minor(jv).rank == rep.full_rank) rep.rank_point = pt;
    }
    return rep;
}

SeriesTuple essential_generators(const GenericSubmanifoldNF& m, int alpha_bound) {
    int p = m.prec();
    if (alpha_bound < 0) alpha_bound = 2 * p / 3;
    alpha_bound = std::max(1, std::min(alpha_bound, p - 1));
    return essential_with_degrees(m, alpha_bound, nullptr);
}

EssFinReport essential_finiteness_test(const GenericSubmanifoldNF& m, int alpha_bound,
                                       int degree_bound) {
    int p = m.prec();
    if (alpha_bound < 0) alpha_bound = 2 * p / 3;
    alpha_bound = std::max(1, std::min(alpha_bound, p - 1));
    if (degree_bound < 0) degree_bound = p;
    EssFinReport rep;
    rep.alpha_bound = alpha_bound;
    std::vector<int> degs;
    SeriesTuple gens = essential_with_degrees(m, alpha_bound, &degs);
    /* increasing jet cutoffs: a span that closes using only low-order
     * coefficients keeps the most validity, and is sound because adding
     * generators only shrinks the quotient */
    for (int cut = 1; cut <= alpha_bound; ++cut) {
        SeriesTuple subset;
        for (size_t i = 0; i < gens.size(); ++i)
            if (degs[i] <= cut) subset.push_back(gens[i]);
        SeriesIdeal ideal{subset};
        StaircaseReport sr = staircase_codim(ideal, degree_bound);
        if (sr.finite()) {
            rep.staircase = sr;
            rep.generators = subset;
            rep.alpha_cut = cut;
            return rep;
        }
        if (cut == alpha_bound) {
            rep.staircase = sr;
            rep.generators = subset;
        }
    }
    rep.curve = find_monomial_curve(rep.generators);
    return rep;
}

}  // namespace crforge
