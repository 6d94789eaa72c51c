#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace akat {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational p/q with arbitrary-precision integers.
// Invariant: den > 0 and gcd(|num|, den) == 1 after every operation.
class BigRational {
public:
    BigRational() : num_(0), den_(1) {}
    BigRational(long long n) : num_(n), den_(1) {}
    BigRational(const BigInt& n) : num_(n), den_(1) {}
    BigRational(BigInt n, BigInt d);

    static BigRational from_decimal(std::string_view text);
    // Accepts "p/q", plain integers and decimal strings.
    static BigRational parse(std::string_view text);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    BigRational operator-() const;
    BigRational& operator+=(const BigRational& o);
    BigRational& operator-=(const BigRational& o);
    BigRational& operator*=(const BigRational& o);
    BigRational& operator/=(const BigRational& o);

    friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
    friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
    friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
    friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }

    friend bool operator==(const BigRational& a, const BigRational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const BigRational& a, const BigRational& b) { return !(a == b); }
    friend bool operator<(const BigRational& a, const BigRational& b);
    friend bool operator>(const BigRational& a, const BigRational& b) { return b < a; }
    friend bool operator<=(const BigRational& a, const BigRational& b) { return !(b < a); }
    friend bool operator>=(const BigRational& a, const BigRational& b) { return !(a < b); }

    BigRational abs() const;
    BigInt floor() const;
    // Representative in [0, 1).
    BigRational frac() const;
    // Distance to the nearest integer, in [0, 1/2].
    BigRational dist_to_integer() const;

    double to_double() const;
    // ln|x| as long double; -inf for zero. Exact enough for inequality
    // ledgers (top 64 bits of num and den are used).
    long double log_abs() const;

    std::string to_string() const;  // "p" or "p/q", decimal

private:
    void normalize();

    BigInt num_, den_;
};

// ln(n) for n > 0 without overflow for huge integers.
long double log_bigint(const BigInt& n);

// Exact rational value of a finite double (doubles are dyadic).
BigRational rational_from_double(double x);

// Smallest integer exponent e with 10^e >= exp(x); used to construct
// denominators that certify bounds of the form 1/q < exp(-x).
int64_t decimal_exponent_for_log(long double x);

BigInt pow10(uint64_t e);

}  // namespace akat
