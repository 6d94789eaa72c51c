#include "akat/ddouble.hpp"

namespace akat::dd {

namespace {

// 2*pi as a double-double constant.
constexpr double kTwoPiHi = 6.283185307179586232e+00;
constexpr double kTwoPiLo = 2.449293598294706414e-16;

struct TrigTables {
    DDouble inv_fact[32];  // 1/k!
    TrigTables() {
        DDouble f = from(1.0);
        inv_fact[0] = from(1.0);
        for (int k = 1; k < 32; ++k) {
            f = mul(f, static_cast<double>(k));  // exact until 2^106
            inv_fact[k] = div(from(1.0), f);
        }
    }
};

const TrigTables& tables() {
    static const TrigTables t;
    return t;
}

// Taylor series on |y| <= pi/4.
DDouble sin_taylor(DDouble y) {
    const auto& T = tables();
    DDouble y2 = mul(y, y);
    DDouble term = y;
    DDouble sum = y;
    for (int k = 3; k <= 29; k += 2) {
        term = mul(term, y2);
        DDouble c = mul(term, T.inv_fact[k]);
        sum = (k % 4 == 3) ? sub(sum, c) : add(sum, c);
    }
    return sum;
}

DDouble cos_taylor(DDouble y) {
    const auto& T = tables();
    DDouble y2 = mul(y, y);
    DDouble term = from(1.0);
    DDouble sum = from(1.0);
    for (int k = 2; k <= 30; k += 2) {
        term = mul(term, y2);
        DDouble c = mul(term, T.inv_fact[k]);
        sum = (k % 4 == 2) ? sub(sum, c) : add(sum, c);
    }
    return sum;
}

}  // namespace

void sincos_turn(DDouble f, DDouble& sin_out, DDouble& cos_out) {
    f = frac(f);
    // Quarter-turn reduction: f = m/4 + g with m in {0..4}, |g| <= 1/8.
    int m = static_cast<int>(std::floor(4.0 * f.hi + 0.5));
    if (m < 0) m = 0;
    if (m > 4) m = 4;
    DDouble g = add(f, -0.25 * m);
    DDouble y = mul(g, DDouble{kTwoPiHi, kTwoPiLo});  // 2*pi*g, |y| <= pi/4
    DDouble s = sin_taylor(y), c = cos_taylor(y);
    switch (m % 4) {
        case 0: sin_out = s; cos_out = c; break;
        case 1: sin_out = c; cos_out = neg(s); break;
        case 2: sin_out = neg(s); cos_out = neg(c); break;
        default: sin_out = neg(c); cos_out = s; break;
    }
}

}  // namespace akat::dd
