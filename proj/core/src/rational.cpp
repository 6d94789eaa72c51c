#include "akat/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace akat {

namespace mp = boost::multiprecision;

BigRational::BigRational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw std::invalid_argument("BigRational: zero denominator");
    normalize();
}

void BigRational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_ == 0) {
        den_ = 1;
        return;
    }
    BigInt g = mp::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

BigRational BigRational::operator-() const {
    BigRational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

BigRational& BigRational::operator+=(const BigRational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

BigRational& BigRational::operator-=(const BigRational& o) {
    num_ = num_ * o.den_ - o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

BigRational& BigRational::operator*=(const BigRational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
}

BigRational& BigRational::operator/=(const BigRational& o) {
    if (o.num_ == 0) throw std::domain_error("BigRational: division by zero");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
}

bool operator<(const BigRational& a, const BigRational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
}

BigRational BigRational::abs() const {
    BigRational r = *this;
    if (r.num_ < 0) r.num_ = -r.num_;
    return r;
}

BigInt BigRational::floor() const {
    BigInt q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
}

BigRational BigRational::frac() const {
    BigRational r = *this;
    r.num_ -= floor() * den_;
    return r;  // already normalized: subtracting an integer keeps gcd
}

BigRational BigRational::dist_to_integer() const {
    BigRational f = frac();
    BigRational other(f.den_ - f.num_, f.den_);
    return f < other ? f : other;
}

double BigRational::to_double() const {
    if (num_ == 0) return 0.0;
    long double l = log_abs();
    if (l < -745.0L) return 0.0;  // underflows double anyway
    if (l > 710.0L) return sign() > 0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
    // Safe range: direct conversion.
    return num_.convert_to<double>() / den_.convert_to<double>();
}

long double log_bigint(const BigInt& n) {
    if (n <= 0) throw std::domain_error("log_bigint: nonpositive");
    unsigned bits = mp::msb(n);  // floor(log2 n)
    if (bits <= 62) return std::log(static_cast<long double>(n.convert_to<uint64_t>()));
    BigInt top = n >> (bits - 62);
    long double mant = static_cast<long double>(top.convert_to<uint64_t>());
    return std::log(mant) + static_cast<long double>(bits - 62) * 0.6931471805599453094L;
}

BigRational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: not finite");
    if (x == 0.0) return BigRational(0);
    int e = 0;
    double m = std::frexp(x, &e);          // x = m * 2^e, |m| in [0.5, 1)
    auto mant = static_cast<long long>(std::ldexp(m, 53));  // exact integer
    int shift = e - 53;
    BigInt num = mant;
    if (shift >= 0) return BigRational(num << shift, BigInt(1));
    return BigRational(num, BigInt(1) << (-shift));
}

long double BigRational::log_abs() const {
    if (num_ == 0) return -std::numeric_limits<long double>::infinity();
    BigInt n = num_ < 0 ? BigInt(-num_) : num_;
    return log_bigint(n) - log_bigint(den_);
}

std::string BigRational::to_string() const {
    std::string s = num_.str();
    if (den_ != 1) {
        s += '/';
        s += den_.str();
    }
    return s;
}

namespace {

BigInt parse_digits(std::string_view digits) {
    if (digits.empty()) throw std::invalid_argument("BigRational: empty digit run");
    // Chunked Horner in base 10^18 keeps parsing near-linear in practice.
    BigInt acc = 0;
    size_t i = 0;
    while (i < digits.size()) {
        size_t take = std::min<size_t>(18, digits.size() - i);
        uint64_t chunk = 0;
        for (size_t j = 0; j < take; ++j) {
            char c = digits[i + j];
            if (c < '0' || c > '9') throw std::invalid_argument("BigRational: bad digit");
            chunk = chunk * 10 + static_cast<uint64_t>(c - '0');
        }
        acc *= pow10(take);
        acc += chunk;
        i += take;
    }
    return acc;
}

}  // namespace

BigInt pow10(uint64_t e) {
    BigInt base = 10, out = 1;
    while (e) {
        if (e & 1) out *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return out;
}

int64_t decimal_exponent_for_log(long double x) {
    if (x <= 0) return 1;
    long double e = x / 2.302585092994045684L;
    return static_cast<int64_t>(std::ceil(e)) + 1;
}

BigRational BigRational::from_decimal(std::string_view text) {
    bool neg = false;
    size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    std::string digits;
    uint64_t frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("BigRational: two dots");
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else {
            throw std::invalid_argument("BigRational: bad decimal character");
        }
    }
    if (!seen_digit) throw std::invalid_argument("BigRational: no digits");
    BigInt n = parse_digits(digits);
    if (neg) n = -n;
    return BigRational(std::move(n), pow10(frac_digits));
}

BigRational BigRational::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::string_view ns = text.substr(0, slash);
        std::string_view ds = text.substr(slash + 1);
        bool nneg = !ns.empty() && ns[0] == '-';
        if (!ns.empty() && (ns[0] == '-' || ns[0] == '+')) ns.remove_prefix(1);
        BigInt n = parse_digits(ns);
        BigInt d = parse_digits(ds);
        return BigRational(nneg ? BigInt(-n) : n, std::move(d));
    }
    return from_decimal(text);
}

}  // namespace akat
