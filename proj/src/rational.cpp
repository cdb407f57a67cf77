#include "phicalc/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace phicalc {

namespace {

long long narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
    return static_cast<long long>(v);
}

Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    return Rational(narrow(n), narrow(d));
}

long long parse_ll(std::string_view s, const std::string& whole) {
    long long v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("bad rational '" + whole + "'");
    return v;
}

}  // namespace

Rational::Rational(long long n, long long d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
        if (n == INT64_MIN || d == INT64_MIN) throw std::overflow_error("rational overflow");
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n, d);
    num_ = n / g;
    den_ = d / g;
}

Rational Rational::operator-() const { return make(-static_cast<__int128>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
    return *this = make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                        static_cast<__int128>(den_) * o.den_);
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    return *this = make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return *this = make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
}

Rational floor(const Rational& r) {
    long long q = r.numerator() / r.denominator();
    if (r.numerator() < 0 && r.numerator() % r.denominator() != 0) --q;
    return Rational(q);
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_ll(s, s));
    long long d = parse_ll(std::string_view(s).substr(slash + 1), s);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rational(parse_ll(std::string_view(s).substr(0, slash), s), d);
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace phicalc
