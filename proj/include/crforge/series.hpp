#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multi_index.hpp"
#include "rational.hpp"

namespace crforge {

struct series_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Multivariate formal power series over Q(i), truncated at total degree
 * `prec` ("valid through order prec").  Invariants:
 *   - no stored zero coefficients
 *   - no stored term of total degree > prec
 *   - term map ordered graded-lex (canonical iteration order)
 * Every operation computes the validity order of its result; equality is
 * only meaningful through the common validity order. */
struct TruncatedSeries {
    int nvars = 0;
    int prec = 0;
    std::map<MultiIndex, ComplexRational, GradedLexLess> terms;

    TruncatedSeries() = default;
    TruncatedSeries(int nv, int p) : nvars(nv), prec(p) {}

    static TruncatedSeries zero(int nv, int p) { return TruncatedSeries(nv, p); }
    static TruncatedSeries constant(int nv, int p, const ComplexRational& c) {
        TruncatedSeries s(nv, p);
        s.add_term(MultiIndex(nv), c);
        return s;
    }
    static TruncatedSeries variable(int nv, int i, int p) {
        TruncatedSeries s(nv, p);
        s.add_term(MultiIndex::unit(nv, i), rat(1));
        return s;
    }
    static TruncatedSeries monomial(int nv, const MultiIndex& m, const ComplexRational& c, int p) {
        TruncatedSeries s(nv, p);
        s.add_term(m, c);
        return s;
    }

    void add_term(const MultiIndex& m, const ComplexRational& c) {
        if (c.is_zero() || m.degree() > prec) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    ComplexRational coeff(const MultiIndex& m) const {
        auto it = terms.find(m);
        return it == terms.end() ? ComplexRational() : it->second;
    }
    ComplexRational constant_term() const { return coeff(MultiIndex(nvars)); }

    bool is_zero() const { return terms.empty(); }
    /* order of vanishing; prec+1 if zero through prec */
    int ord() const { return terms.empty() ? prec + 1 : terms.begin()->first.degree(); }
    int max_degree() const { return terms.empty() ? 0 : terms.rbegin()->first.degree(); }
};

using SeriesTuple = std::vector<TruncatedSeries>;

/* ---- arithmetic ---- */

TruncatedSeries truncate_to(const TruncatedSeries& f, int new_prec);
TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries negate(const TruncatedSeries& a);
TruncatedSeries scale(const TruncatedSeries& a, const ComplexRational& c);
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries pow_series(const TruncatedSeries& a, int k);

bool is_zero_through(const TruncatedSeries& f, int order);
bool equal_through(const TruncatedSeries& a, const TruncatedSeries& b, int order);
/* equality through the common validity order */
bool equal_on_common(const TruncatedSeries& a, const TruncatedSeries& b);

/* ---- structural ops ---- */

/* d^order/d x_var^order; result validity drops by `order` */
TruncatedSeries derive(const TruncatedSeries& f, int var, int order = 1);

/* coefficient-conjugation bar(f); optional positional permutation of the
 * variables applied afterwards (perm[i] = new slot of old variable i) */
TruncatedSeries bar_conjugate(const TruncatedSeries& f, const std::vector<int>* perm = nullptr);

/* rename variables into a possibly larger space: old var i -> slot where[i] */
TruncatedSeries remap_vars(const TruncatedSeries& f, int new_nvars, const std::vector<int>& where);

/* substitute x_var := 0 */
TruncatedSeries set_var_zero(const TruncatedSeries& f, int var);

/* formal composition f(subs_0, ..., subs_{m-1}); every subs_i must have zero
 * constant term so truncation is well defined; validity = min over inputs.
 * If `exact_poly` is set, f's term list is taken as exhaustive (a genuine
 * polynomial) and substitutions may have constant terms; validity is then the
 * min over the substitutions alone. */
TruncatedSeries compose(const TruncatedSeries& f, const SeriesTuple& subs, bool exact_poly = false);

/* multiplicative inverse of a unit (nonzero constant term) */
TruncatedSeries invert_unit(const TruncatedSeries& f);

/* evaluate the truncated representative at a rational point */
ComplexRational eval_at_point(const TruncatedSeries& f, const std::vector<ComplexRational>& pt);

/* coefficient of x_block^alpha where `block` lists variable slots; returns the
 * series in the remaining variables (same ambient space, block slots unused) */
TruncatedSeries block_coefficient(const TruncatedSeries& f, const std::vector<int>& block,
                                  const MultiIndex& alpha);
/* all block exponents with nonzero coefficient series */
std::vector<MultiIndex> block_support(const TruncatedSeries& f, const std::vector<int>& block);

std::string series_to_string(const TruncatedSeries& f, const std::vector<std::string>& var_names = {});

/* ---- tuple helpers ---- */

SeriesTuple tuple_zero(int count, int nv, int p);
SeriesTuple identity_tuple(int nv, int p);                 /* (x_0, ..., x_{nv-1}) */
SeriesTuple bar_tuple(const SeriesTuple& t);
SeriesTuple compose_tuple(const SeriesTuple& fs, const SeriesTuple& subs, bool exact_poly = false);
SeriesTuple remap_tuple(const SeriesTuple& t, int new_nvars, const std::vector<int>& where);
bool tuple_zero_through(const SeriesTuple& t, int order);
int tuple_prec(const SeriesTuple& t);

}  // namespace crforge
