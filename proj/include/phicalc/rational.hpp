#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace phicalc {

// Exact rational over int64 with overflow checks (throws std::overflow_error).
// boost::rational is not usable here: with C++20 rewritten comparisons its
// mixed rational/int operator== recurses forever on the installed Boost.
class Rational {
public:
    constexpr Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit on purpose
    Rational(long long n, long long d);

    long long numerator() const { return num_; }
    long long denominator() const { return den_; }

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    long long num_ = 0, den_ = 1;
};

// "3", "-1/2"; throws std::invalid_argument on junk.
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational floor(const Rational& r);
inline Rational frac(const Rational& r) { return r - floor(r); }

}  // namespace phicalc
