#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crforge {

/* Gaussian rational a + b*i with exact mpq components.
 * Canonical form is inherited from mpq_class (lowest terms, positive
 * denominator); helpers below keep string I/O canonical too. */
struct ComplexRational {
    mpq_class re;
    mpq_class im;

    ComplexRational() : re(0), im(0) {}
    ComplexRational(long r) : re(r), im(0) {}
    ComplexRational(const mpq_class& r) : re(r), im(0) {}
    ComplexRational(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static ComplexRational i() { return ComplexRational(mpq_class(0), mpq_class(1)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    ComplexRational conj() const { return ComplexRational(re, -im); }

    ComplexRational operator-() const { return ComplexRational(-re, -im); }

    ComplexRational& operator+=(const ComplexRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    ComplexRational& operator-=(const ComplexRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    ComplexRational& operator*=(const ComplexRational& o) {
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
    friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
    friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }

    ComplexRational inv() const {
        if (is_zero()) throw std::domain_error("ComplexRational: division by zero");
        mpq_class n = re * re + im * im;
        return ComplexRational(re / n, -im / n);
    }
    friend ComplexRational operator/(const ComplexRational& a, const ComplexRational& b) {
        return a * b.inv();
    }

    friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const ComplexRational& a, const ComplexRational& b) { return !(a == b); }
};

inline ComplexRational rat(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rat: zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return ComplexRational(q);
}

/* c = (nr/dr) + (ni/di) i */
inline ComplexRational crat(long nr, long dr, long ni, long di) {
    if (dr == 0 || di == 0) throw std::domain_error("crat: zero denominator");
    mpq_class r(nr, dr), i(ni, di);
    r.canonicalize();
    i.canonicalize();
    return ComplexRational(std::move(r), std::move(i));
}

/* "p/q" or "p", lowest terms, denominator > 0. */
inline std::string rational_to_string(const mpq_class& q) {
    return q.get_str();
}

inline mpq_class rational_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rational_from_string: empty");
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("rational_from_string: bad literal '" + s + "'");
    q.canonicalize();
    return q;
}

/* Human-readable complex literal, e.g. "2i", "1-1/2i", "3/4". */
inline std::string complex_to_string(const ComplexRational& c) {
    if (c.is_zero()) return "0";
    std::string out;
    if (sgn(c.re) != 0) out += rational_to_string(c.re);
    if (sgn(c.im) != 0) {
        if (!out.empty() && sgn(c.im) > 0) out += "+";
        if (c.im == -1)
            out += "-";
        else if (c.im != 1)
            out += rational_to_string(c.im);
        out += "i";
    }
    return out;
}

}  // namespace crforge
