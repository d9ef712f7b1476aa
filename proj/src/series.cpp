#include "crforge/series.hpp"

#include <algorithm>
#include <sstream>

namespace crforge {

TruncatedSeries truncate_to(const TruncatedSeries& f, int new_prec) {
    TruncatedSeries r(f.nvars, new_prec);
    for (const auto& [m, c] : f.terms) {
        if (m.degree() > new_prec) break; /* graded order: all later terms too big */
        r.terms.emplace(m, c);
    }
    return r;
}

static void check_same_space(const TruncatedSeries& a, const TruncatedSeries& b, const char* op) {
    if (a.nvars != b.nvars) throw series_error(std::string(op) + ": variable count mismatch");
}

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
    check_same_space(a, b, "add");
    TruncatedSeries r(a.nvars, std::min(a.prec, b.prec));
    for (const auto& [m, c] : a.terms) r.add_term(m, c);
    for (const auto& [m, c] : b.terms) r.add_term(m, c);
    return r;
}

TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b) {
    check_same_space(a, b, "sub");
    TruncatedSeries r(a.nvars, std::min(a.prec, b.prec));
    for (const auto& [m, c] : a.terms) r.add_term(m, c);
    for (const auto& [m, c] : b.terms) r.add_term(m, -c);
    return r;
}

TruncatedSeries negate(const TruncatedSeries& a) {
    TruncatedSeries r(a.nvars, a.prec);
    for (const auto& [m, c] : a.terms) r.terms.emplace(m, -c);
    return r;
}

TruncatedSeries scale(const TruncatedSeries& a, const ComplexRational& c) {
    TruncatedSeries r(a.nvars, a.prec);
    if (c.is_zero()) return r;
    for (const auto& [m, k] : a.terms) r.terms.emplace(m, k * c);
    return r;
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    check_same_space(a, b, "mul");
    TruncatedSeries r(a.nvars, std::min(a.prec, b.prec));
    for (const auto& [ma, ca] : a.terms) {
        int da = ma.degree();
        if (da > r.prec) break;
        for (const auto& [mb, cb] : b.terms) {
            if (da + mb.degree() > r.prec) break;
            r.add_term(ma + mb, ca * cb);
        }
    }
    return r;
}

TruncatedSeries pow_series(const TruncatedSeries& a, int k) {
    if (k < 0) throw series_error("pow_series: negative exponent");
    TruncatedSeries r = TruncatedSeries::constant(a.nvars, a.prec, rat(1));
    for (int i = 0; i < k; ++i) r = mul(r, a);
    return r;
}

bool is_zero_through(const TruncatedSeries& f, int order) {
    if (order > f.prec) throw series_error("is_zero_through: order beyond validity");
    for (const auto& [m, c] : f.terms) {
        if (m.degree() > order) break;
        (void)c;
        return false;
    }
    return true;
}

bool equal_through(const TruncatedSeries& a, const TruncatedSeries& b, int order) {
    return is_zero_through(sub(a, b), order);
}

bool equal_on_common(const TruncatedSeries& a, const TruncatedSeries& b) {
    return equal_through(a, b, std::min(a.prec, b.prec));
}

TruncatedSeries derive(const TruncatedSeries& f, int var, int order) {
    if (var < 0 || var >= f.nvars) throw series_error("derive: bad variable");
    if (order < 0) throw series_error("derive: negative order");
    TruncatedSeries r = f;
    for (int it = 0; it < order; ++it) {
        TruncatedSeries d(r.nvars, std::max(r.prec - 1, 0));
        for (const auto& [m, c] : r.terms) {
            if (m[var] == 0) continue;
            MultiIndex mm = m;
            mm[var] -= 1;
            d.add_term(mm, c * rat(m[var]));
        }
        r = std::move(d);
    }
    return r;
}

TruncatedSeries bar_conjugate(const TruncatedSeries& f, const std::vector<int>* perm) {
    TruncatedSeries r(f.nvars, f.prec);
    for (const auto& [m, c] : f.terms) {
        if (perm) {
            MultiIndex mm(f.nvars);
            for (int i = 0; i < f.nvars; ++i) mm[(*perm)[i]] = m[i];
            r.add_term(mm, c.conj());
        } else {
            r.terms.emplace(m, c.conj());
        }
    }
    return r;
}

TruncatedSeries remap_vars(const TruncatedSeries& f, int new_nvars, const std::vector<int>& where) {
    if (static_cast<int>(where.size()) != f.nvars) throw series_error("remap_vars: map size mismatch");
    TruncatedSeries r(new_nvars, f.prec);
    for (const auto& [m, c] : f.terms) {
        MultiIndex mm(new_nvars);
        for (int i = 0; i < f.nvars; ++i) {
            if (m[i] == 0) continue;
            if (where[i] < 0 || where[i] >= new_nvars) throw series_error("remap_vars: slot out of range");
            mm[where[i]] += m[i];
        }
        r.add_term(mm, c);
    }
    return r;
}

TruncatedSeries set_var_zero(const TruncatedSeries& f, int var) {
    TruncatedSeries r(f.nvars, f.prec);
    for (const auto& [m, c] : f.terms)
        if (m[var] == 0) r.terms.emplace(m, c);
    return r;
}

TruncatedSeries compose(const TruncatedSeries& f, const SeriesTuple& subs, bool exact_poly) {
    if (static_cast<int>(subs.size()) != f.nvars) throw series_error("compose: substitution count mismatch");
    int out_nv = subs.empty() ? 0 : subs[0].nvars;
    int out_prec = exact_poly ? INT32_MAX : f.prec;
    for (const auto& s : subs) {
        if (s.nvars != out_nv) throw series_error("compose: substitutions in different spaces");
        out_prec = std::min(out_prec, s.prec);
        if (!exact_poly && !s.constant_term().is_zero())
            throw series_error("compose: substitution has nonzero constant term");
    }
    if (subs.empty()) {
        /* 0-variable source: f is a constant */
        TruncatedSeries r(0, f.prec);
        r.add_term(MultiIndex(0), f.constant_term());
        return r;
    }
    TruncatedSeries out(out_nv, out_prec);
    /* cache subs_i^e */
    std::vector<std::vector<TruncatedSeries>> pows(f.nvars);
    auto power_of = [&](int i, int e) -> const TruncatedSeries& {
        auto& cache = pows[i];
        if (cache.empty()) cache.push_back(TruncatedSeries::constant(out_nv, out_prec, rat(1)));
        while (static_cast<int>(cache.size()) <= e) cache.push_back(mul(cache.back(), subs[i]));
        return cache[e];
    };
    for (const auto& [m, c] : f.terms) {
        /* zero-constant substitutions: a term of degree > out_prec only
         * affects orders beyond the result's validity */
        if (!exact_poly && m.degree() > out_prec) continue;
        TruncatedSeries term = TruncatedSeries::constant(out_nv, out_prec, c);
        for (int i = 0; i < f.nvars && !term.is_zero(); ++i)
            if (m[i] > 0) term = mul(term, power_of(i, m[i]));
        out = add(out, term);
    }
    return out;
}

TruncatedSeries invert_unit(const TruncatedSeries& f) {
    ComplexRational c0 = f.constant_term();
    if (c0.is_zero()) throw series_error("invert_unit: not a unit (zero constant term)");
    /* 1/f = (1/c0) * sum_k (1 - f/c0)^k, nilpotent tail mod degree prec+1 */
    TruncatedSeries t = sub(TruncatedSeries::constant(f.nvars, f.prec, rat(1)), scale(f, c0.inv()));
    TruncatedSeries acc = TruncatedSeries::constant(f.nvars, f.prec, rat(1));
    TruncatedSeries tk = t;
    for (int k = 1; k <= f.prec && !tk.is_zero(); ++k) {
        acc = add(acc, tk);
        tk = mul(tk, t);
    }
    return scale(acc, c0.inv());
}

ComplexRational eval_at_point(const TruncatedSeries& f, const std::vector<ComplexRational>& pt) {
    if (static_cast<int>(pt.size()) != f.nvars) throw series_error("eval_at_point: dimension mismatch");
    ComplexRational acc;
    for (const auto& [m, c] : f.terms) {
        ComplexRational v = c;
        for (int i = 0; i < f.nvars; ++i)
            for (int k = 0; k < m[i]; ++k) v *= pt[i];
        acc += v;
    }
    return acc;
}

TruncatedSeries block_coefficient(const TruncatedSeries& f, const std::vector<int>& block,
                                  const MultiIndex& alpha) {
    TruncatedSeries r(f.nvars, f.prec);
    for (const auto& [m, c] : f.terms) {
        bool match = true;
        for (size_t k = 0; k < block.size(); ++k)
            if (m[block[k]] != alpha[static_cast<int>(k)]) {
                match = false;
                break;
            }
        if (!match) continue;
        MultiIndex mm = m;
        for (int slot : block) mm[slot] = 0;
        r.add_term(mm, c);
    }
    return r;
}

std::vector<MultiIndex> block_support(const TruncatedSeries& f, const std::vector<int>& block) {
    std::map<MultiIndex, bool, GradedLexLess> seen;
    for (const auto& [m, c] : f.terms) {
        (void)c;
        MultiIndex a(static_cast<int>(block.size()));
        for (size_t k = 0; k < block.size(); ++k) a[static_cast<int>(k)] = m[block[k]];
        seen[a] = true;
    }
    std::vector<MultiIndex> out;
    for (const auto& [a, _] : seen) out.push_back(a);
    return out;
}

std::string series_to_string(const TruncatedSeries& f, const std::vector<std::string>& var_names) {
    if (f.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : f.terms) {
        std::string cs = complex_to_string(c);
        if (!first) os << " + ";
        first = false;
        os << "(" << cs << ")";
        for (int i = 0; i < f.nvars; ++i) {
            if (m[i] == 0) continue;
            os << "*";
            if (static_cast<int>(var_names.size()) > i)
                os << var_names[i];
            else
                os << "x" << i;
            if (m[i] > 1) os << "^" << m[i];
        }
    }
    return os.str();
}

SeriesTuple tuple_zero(int count, int nv, int p) {
    return SeriesTuple(count, TruncatedSeries::zero(nv, p));
}

SeriesTuple identity_tuple(int nv, int p) {
    SeriesTuple t;
    for (int i = 0; i < nv; ++i) t.push_back(TruncatedSeries::variable(nv, i, p));
    return t;
}

SeriesTuple bar_tuple(const SeriesTuple& t) {
    SeriesTuple r;
    for (const auto& f : t) r.push_back(bar_conjugate(f));
    return r;
}

SeriesTuple compose_tuple(const SeriesTuple& fs, const SeriesTuple& subs, bool exact_poly) {
    SeriesTuple r;
    for (const auto& f : fs) r.push_back(compose(f, subs, exact_poly));
    return r;
}

SeriesTuple remap_tuple(const SeriesTuple& t, int new_nvars, const std::vector<int>& where) {
    SeriesTuple r;
    for (const auto& f : t) r.push_back(remap_vars(f, new_nvars, where));
    return r;
}

bool tuple_zero_through(const SeriesTuple& t, int order) {
    for (const auto& f : t)
        if (!is_zero_through(f, order)) return false;
    return true;
}

int tuple_prec(const SeriesTuple& t) {
    int p = INT32_MAX;
    for (const auto& f : t) p = std::min(p, f.prec);
    return t.empty() ? 0 : p;
}

}  // namespace crforge
