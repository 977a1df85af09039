#pragma once

// Double-double arithmetic (~32 significant digits): an unevaluated sum of
// two doubles, following the classic error-free transformations (two_sum,
// FMA-based two_prod). Used by the extended-precision basis build, where the
// weight's square-root dynamic range exceeds double's 16 digits.

#include <cmath>
#include <cstdint>

namespace ump {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    dd() = default;
    dd(double h) : hi(h), lo(0.0) {}
    dd(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
};

namespace ddops {

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return dd(s, b - (s - a));
}

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return dd(s, (a - (s - bb)) + (b - bb));
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return dd(p, std::fma(a, b, -p));
}

} // namespace ddops

inline dd operator+(dd a, dd b) {
    dd s = ddops::two_sum(a.hi, b.hi);
    dd t = ddops::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = ddops::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return ddops::quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return dd(-a.hi, -a.lo); }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
    dd p = ddops::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return ddops::quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * dd(q1);
    double q2 = r.hi / b.hi;
    r = r - b * dd(q2);
    double q3 = r.hi / b.hi;
    dd q = ddops::quick_two_sum(q1, q2);
    return q + dd(q3);
}

inline dd& operator+=(dd& a, dd b) { a = a + b; return a; }
inline dd& operator-=(dd& a, dd b) { a = a - b; return a; }
inline dd& operator*=(dd& a, dd b) { a = a * b; return a; }

inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }

inline dd dd_abs(dd a) { return a.hi < 0.0 ? -a : a; }

inline dd dd_ldexp(dd a, int e) { return dd(std::ldexp(a.hi, e), std::ldexp(a.lo, e)); }

inline dd dd_sqrt(dd a) {
    if (a.hi <= 0.0) return dd(0.0);
    double s = std::sqrt(a.hi);
    dd sd(s);
    dd e = a - sd * sd;
    return sd + dd(e.hi / (2.0 * s));
}

namespace ddconst {
// High and low parts of the core constants (hi = nearest double, lo = residual).
inline const dd pi(3.141592653589793116, 1.224646799147353207e-16);
inline const dd two_pi(6.283185307179586232, 2.449293598294706414e-16);
inline const dd half_pi(1.570796326794896558, 6.123233995736766036e-17);
inline const dd ln2(0.69314718055994530942, 2.3190468138462995584e-17);
} // namespace ddconst

inline dd dd_exp(dd a) {
    // e^a = 2^m e^r with r = a - m ln2, |r| <= ln2/2; Taylor on r.
    if (a.hi > 709.0) return dd(INFINITY);
    if (a.hi < -709.0) return dd(0.0);
    const double m = std::round(a.hi / ddconst::ln2.hi);
    dd r = a - ddconst::ln2 * dd(m);
    dd sum(1.0), term(1.0);
    for (int k = 1; k <= 24; ++k) {
        term = term * r / dd(static_cast<double>(k));
        sum += term;
        if (std::abs(term.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    return dd_ldexp(sum, static_cast<int>(m));
}

namespace detail_dd {

// cos/sin on |r| <= pi/4 by Taylor series in double-double.
inline dd cos_taylor(dd r) {
    dd r2 = r * r;
    dd sum(1.0), term(1.0);
    for (int k = 1; k <= 16; ++k) {
        term = term * r2 / dd(static_cast<double>(2 * k - 1) * static_cast<double>(2 * k));
        sum = (k % 2) ? sum - term : sum + term;
        if (std::abs(term.hi) < 1e-35) break;
    }
    return sum;
}

inline dd sin_taylor(dd r) {
    dd r2 = r * r;
    dd sum = r, term = r;
    for (int k = 1; k <= 16; ++k) {
        term = term * r2 / dd(static_cast<double>(2 * k) * static_cast<double>(2 * k + 1));
        sum = (k % 2) ? sum - term : sum + term;
        if (std::abs(term.hi) < 1e-35) break;
    }
    return sum;
}

} // namespace detail_dd

// cos and sin with argument reduction modulo pi/2 (adequate for |a| up to a
// few thousand, far beyond the k*lambda range used here).
inline void dd_sincos(dd a, dd& s, dd& c) {
    const double q = std::round(a.hi / ddconst::half_pi.hi);
    dd r = a - ddconst::half_pi * dd(q);
    // One correction step in case the first reduction landed near a boundary.
    dd cr = detail_dd::cos_taylor(r);
    dd sr = detail_dd::sin_taylor(r);
    const long long qi = static_cast<long long>(q);
    switch (((qi % 4) + 4) % 4) {
        case 0: c = cr; s = sr; break;
        case 1: c = -sr; s = cr; break;
        case 2: c = -cr; s = -sr; break;
        default: c = sr; s = -cr; break;
    }
}

inline dd dd_cos(dd a) {
    dd s, c;
    dd_sincos(a, s, c);
    return c;
}

// Minimal complex double-double: enough for Gram-Schmidt inner products.
struct ddc {
    dd re, im;
    ddc() = default;
    ddc(dd r, dd i) : re(r), im(i) {}
};

inline ddc operator+(ddc a, ddc b) { return ddc(a.re + b.re, a.im + b.im); }
inline ddc operator-(ddc a, ddc b) { return ddc(a.re - b.re, a.im - b.im); }
inline ddc operator*(ddc a, ddc b) {
    return ddc(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
inline ddc conj(ddc a) { return ddc(a.re, -a.im); }
inline ddc operator*(dd a, ddc b) { return ddc(a * b.re, a * b.im); }
inline dd norm2(ddc a) { return a.re * a.re + a.im * a.im; }

} // namespace ump
