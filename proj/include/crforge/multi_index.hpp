#pragma once

#include <gmpxx.h>

#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace crforge {

/* Exponent vector of a monomial. Length == number of variables. */
struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(int nvars) : e(nvars, 0) {}
    MultiIndex(std::initializer_list<int> init) : e(init) {}

    int size() const { return static_cast<int>(e.size()); }
    int operator[](int i) const { return e[i]; }
    int& operator[](int i) { return e[i]; }

    int degree() const { return std::accumulate(e.begin(), e.end(), 0); }
    bool is_zero() const {
        for (int x : e)
            if (x != 0) return false;
        return true;
    }

    static MultiIndex unit(int nvars, int i) {
        MultiIndex m(nvars);
        m.e[i] = 1;
        return m;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
        return r;
    }
    /* componentwise difference; throws if any entry would go negative */
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (size_t i = 0; i < e.size(); ++i) {
            r.e[i] -= o.e[i];
            if (r.e[i] < 0) throw std::domain_error("MultiIndex: negative exponent");
        }
        return r;
    }
    bool leq_componentwise(const MultiIndex& o) const {
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e == b.e; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return a.e != b.e; }

    /* alpha! = prod alpha_i! */
    mpz_class factorial() const {
        mpz_class f = 1;
        for (int x : e) {
            mpz_class g;
            mpz_fac_ui(g.get_mpz_t(), static_cast<unsigned long>(x));
            f *= g;
        }
        return f;
    }
};

inline bool lex_less(const MultiIndex& a, const MultiIndex& b) {
    return a.e < b.e;
}

/* Graded lexicographic: lower total degree first, ties broken by lex on the
 * exponent vector (earlier variables more significant, smaller exponent first).
 * This is the canonical term order everywhere: map ordering, emission, and
 * search enumerations. */
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.e < b.e;
}

struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return graded_lex_less(a, b); }
};

/* All multi-indices with nvars entries and total degree == deg, graded-lex order. */
inline void enumerate_exact_degree(int nvars, int deg, std::vector<MultiIndex>& out) {
    MultiIndex cur(nvars);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == nvars - 1) {
            cur.e[pos] = remaining;
            out.push_back(cur);
            cur.e[pos] = 0;
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            cur.e[pos] = k;
            rec(pos + 1, remaining - k);
        }
        cur.e[pos] = 0;
    };
    if (nvars == 0) {
        if (deg == 0) out.push_back(MultiIndex(0));
        return;
    }
    rec(0, deg);
}

inline std::vector<MultiIndex> monomials_of_degree(int nvars, int deg) {
    std::vector<MultiIndex> out;
    enumerate_exact_degree(nvars, deg, out);
    /* fix lex order within the degree level: enumeration above emits
     * ascending in e[0], which is already lex-ascending */
    return out;
}

inline std::vector<MultiIndex> monomials_up_to_degree(int nvars, int max_deg) {
    std::vector<MultiIndex> out;
    for (int d = 0; d <= max_deg; ++d) enumerate_exact_degree(nvars, d, out);
    return out;
}

}  // namespace crforge
