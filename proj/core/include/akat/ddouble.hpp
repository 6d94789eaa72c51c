#pragma once

#include <cmath>

namespace akat {

// Two-float (double-double) arithmetic, ~106-bit significand. Used to keep
// q*theta mod 1 and q^2 cos(2 pi q theta) mod 1 meaningful when q is large
// enough for plain doubles to lose the fractional part.
struct DDouble {
    double hi = 0, lo = 0;
};

namespace dd {

inline DDouble quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DDouble two_sum(double a, double b) {
    double s = a + b;
    double v = s - a;
    return {s, (a - (s - v)) + (b - v)};
}

inline DDouble two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DDouble from(double x) { return {x, 0.0}; }

inline DDouble add(DDouble a, DDouble b) {
    DDouble s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DDouble add(DDouble a, double b) {
    DDouble s = two_sum(a.hi, b);
    s.lo += a.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DDouble sub(DDouble a, DDouble b) { return add(a, DDouble{-b.hi, -b.lo}); }
inline DDouble neg(DDouble a) { return {-a.hi, -a.lo}; }

inline DDouble mul(DDouble a, DDouble b) {
    DDouble p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DDouble mul(DDouble a, double b) {
    DDouble p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline DDouble div(DDouble a, DDouble b) {
    double q1 = a.hi / b.hi;
    DDouble r = sub(a, mul(b, q1));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, q2));
    double q3 = r.hi / b.hi;
    DDouble q = quick_two_sum(q1, q2);
    return add(q, q3);
}

inline DDouble floor(DDouble a) {
    double f = std::floor(a.hi);
    if (f == a.hi) {
        double g = std::floor(a.lo);
        return quick_two_sum(f, g);
    }
    return {f, 0.0};
}

// a - floor(a), clamped into [0,1).
inline DDouble frac(DDouble a) {
    DDouble f = sub(a, floor(a));
    if (f.hi < 0.0) f = add(f, 1.0);
    if (f.hi >= 1.0) f = add(f, -1.0);
    return f;
}

inline double to_double(DDouble a) { return a.hi + a.lo; }

// sin and cos of 2*pi*f for a turn fraction f (any range; reduced mod 1).
void sincos_turn(DDouble f, DDouble& sin_out, DDouble& cos_out);

}  // namespace dd
}  // namespace akat
