#include "ptune/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace ptune {

Rational make_rational(std::int64_t num, std::int64_t den)
{
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    Rational r{mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den))};
    r.canonicalize();
    return r;
}

namespace {

Rational parse_decimal(std::string_view text)
{
    std::string s(text);
    std::size_t epos = s.find_first_of("eE");
    long exponent = 0;
    if (epos != std::string::npos) {
        exponent = std::stol(s.substr(epos + 1));
        s = s.substr(0, epos);
    }
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s = s.substr(1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_point) {
                throw std::invalid_argument("malformed number: " + std::string(text));
            }
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_point) {
                ++frac_digits;
            }
        } else {
            throw std::invalid_argument("malformed number: " + std::string(text));
        }
    }
    if (digits.empty()) {
        throw std::invalid_argument("malformed number: " + std::string(text));
    }
    mpz_class num(digits, 10);
    mpz_class den = 1;
    long shift = exponent - frac_digits;
    mpz_class ten = 10;
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(shift)));
    if (shift >= 0) {
        num *= power;
    } else {
        den = power;
    }
    Rational r(num, den);
    r.canonicalize();
    if (negative) {
        r = -r;
    }
    return r;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    if (text.empty()) {
        throw std::invalid_argument("empty rational");
    }
    std::size_t slash = text.find('/');
    if (slash == std::string_view::npos) {
        return parse_decimal(text);
    }
    std::string num(text.substr(0, slash));
    std::string den(text.substr(slash + 1));
    mpz_class n, d;
    if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0 || d == 0) {
        throw std::invalid_argument("malformed rational: " + std::string(text));
    }
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string to_pq_string(const Rational& r)
{
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

double to_double(const Rational& r)
{
    return r.get_d();
}

Rational snap(double value, std::int64_t denominator)
{
    if (!std::isfinite(value)) {
        throw std::invalid_argument("cannot snap a non-finite value");
    }
    auto scaled = static_cast<std::int64_t>(std::llround(value * static_cast<double>(denominator)));
    return make_rational(scaled, denominator);
}

Rational dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: dimension mismatch");
    }
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) {
            s += a[i] * b[i];
        }
    }
    return s;
}

Vec add(const Vec& a, const Vec& b)
{
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

Vec sub(const Vec& a, const Vec& b)
{
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

Vec scale(const Vec& a, const Rational& s)
{
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] * s;
    }
    return out;
}

Vec zeros(std::size_t d)
{
    return Vec(d, Rational(0));
}

bool is_zero(const Vec& a)
{
    for (const auto& x : a) {
        if (sgn(x) != 0) {
            return false;
        }
    }
    return true;
}

int sign(const Rational& r)
{
    return sgn(r);
}

} // namespace ptune
